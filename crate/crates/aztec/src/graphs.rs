//! Aztec and tower Aztec diamond graphs, their tilings and lattice paths.
//!
//! White vertices have odd `x` and even `y`; black vertices have even `x`
//! and odd `y`. Both orderings are 1-based in the formulas below and stored
//! 0-based in the vectors.

use crate::error::{Error, Result};
use crate::numerics::{rational_to_string, Rational};
use crate::weights::{white_neighbours, Coord, WeightField};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Default bound on the number of matchings [`enumerate_tilings`] accepts.
pub const DEFAULT_TILING_GUARD: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Flavor {
    Aztec { n: usize },
    Tower { n: usize, p: usize },
}

impl Flavor {
    pub fn n(&self) -> usize {
        match *self {
            Flavor::Aztec { n } | Flavor::Tower { n, .. } => n,
        }
    }

    /// Index where the Schur blocks split: `n`, or `n + p` for the tower.
    pub fn split(&self) -> usize {
        match *self {
            Flavor::Aztec { n } => n,
            Flavor::Tower { n, p } => n + p,
        }
    }
}

/// `w_n^Az(i)` for `1 ≤ i ≤ n(n+1)`.
pub fn aztec_white(n: usize, i: usize) -> Coord {
    let (n, i) = (n as i64, i as i64);
    if i <= n {
        (2 * i - 1, 0)
    } else {
        (2 * ((i - 1) % n) + 1, 2 * n + 2 - 2 * ((i - 1) / n))
    }
}

/// `b_n^Az(i)` for `1 ≤ i ≤ n(n+1)`.
pub fn aztec_black(n: usize, i: usize) -> Coord {
    let (n, i) = (n as i64, i as i64);
    if i <= n {
        (0, 2 * i - 1)
    } else {
        (2 * ((i - 1) % n) + 2, 2 * n + 1 - 2 * ((i - 1) / n))
    }
}

/// `w_{n,p}^Tow(i)` for `1 ≤ i ≤ n(2n+p)`.
pub fn tower_white(n: usize, p: usize, i: usize) -> Coord {
    let (n, p, i) = (n as i64, p as i64, i as i64);
    if i <= n + p {
        (2 * n - 1, 2 - 2 * i)
    } else if i < 2 * n + p + n * n {
        let t = i - (n + p + 1);
        (2 * (t % n) + 1, 2 * n - 2 * (t / n))
    } else {
        let t = i - (n * n + p + 2 * n);
        (2 * (t % (n - 1)) + 1, -2 - 2 * (t / (n - 1)))
    }
}

/// `b_{n,p}^Tow(i)` for `1 ≤ i ≤ n(2n+p)`.
pub fn tower_black(n: usize, p: usize, i: usize) -> Coord {
    let (n, p, i) = (n as i64, p as i64, i as i64);
    if i <= n + p {
        (0, 2 * n + 1 - 2 * i)
    } else if i <= n + p + n * n {
        let t = i - (n + p + 1);
        (2 * (t % n) + 2, 2 * n - 1 - 2 * (t / n))
    } else {
        let t = i - (n * n + n + p + 1);
        (2 * (t % (n - 1)) + 2, -1 - 2 * (t / (n - 1)))
    }
}

/// An edge of a dimer graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub black: Coord,
    pub white: Coord,
    pub weight: Rational,
}

/// A bipartite dimer graph with its vertex orderings.
#[derive(Clone, Debug)]
pub struct DimerGraph {
    pub flavor: Flavor,
    pub whites: Vec<Coord>,
    pub blacks: Vec<Coord>,
    pub edges: Vec<Edge>,
    white_index: HashMap<Coord, usize>,
    black_index: HashMap<Coord, usize>,
    edge_index: HashMap<(Coord, Coord), usize>,
    /// Edge indices per black vertex, in NE, SE, SW, NW order.
    incident: Vec<Vec<usize>>,
}

pub type AztecGraph = DimerGraph;
pub type TowerGraph = DimerGraph;

impl DimerGraph {
    /// Graph on the given orderings; `weight(black, white)` is asked for
    /// every adjacent pair.
    pub fn new(flavor: Flavor, whites: Vec<Coord>, blacks: Vec<Coord>, mut weight: impl FnMut(Coord, Coord) -> Rational) -> Result<Self> {
        let white_index: HashMap<Coord, usize> = whites.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let black_index: HashMap<Coord, usize> = blacks.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        if white_index.len() != whites.len() || black_index.len() != blacks.len() {
            return Err(Error::Consistency("repeated vertex in ordering".into()));
        }
        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        let mut incident = vec![Vec::new(); blacks.len()];
        for (bi, &bl) in blacks.iter().enumerate() {
            for wh in white_neighbours(bl) {
                if white_index.contains_key(&wh) {
                    let w = weight(bl, wh);
                    if w.is_zero() {
                        return Err(Error::Domain(format!("zero weight on edge {bl:?}-{wh:?}")));
                    }
                    edge_index.insert((bl, wh), edges.len());
                    incident[bi].push(edges.len());
                    edges.push(Edge { black: bl, white: wh, weight: w });
                }
            }
        }
        Ok(DimerGraph { flavor, whites, blacks, edges, white_index, black_index, edge_index, incident })
    }

    pub fn size(&self) -> usize {
        self.blacks.len()
    }

    pub fn white_index(&self, v: Coord) -> Option<usize> {
        self.white_index.get(&v).copied()
    }

    pub fn black_index(&self, v: Coord) -> Option<usize> {
        self.black_index.get(&v).copied()
    }

    pub fn edge(&self, black: Coord, white: Coord) -> Option<&Edge> {
        self.edge_index.get(&(black, white)).map(|&k| &self.edges[k])
    }

    /// Edges at black vertex number `bi` (0-based).
    pub fn incident(&self, bi: usize) -> impl Iterator<Item = &Edge> {
        self.incident[bi].iter().map(|&k| &self.edges[k])
    }

    pub fn degree(&self, v: Coord) -> usize {
        if let Some(bi) = self.black_index(v) {
            self.incident[bi].len()
        } else {
            self.edges.iter().filter(|e| e.white == v).count()
        }
    }

    /// JSON adjacency list with weights.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "flavor": self.flavor,
            "whites": self.whites,
            "blacks": self.blacks,
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "black": e.black, "white": e.white, "weight": rational_to_string(&e.weight)
            })).collect::<Vec<_>>(),
        })
    }

    /// Graphviz DOT text with vertices at their lattice positions.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dimers {\n  node [shape=point];\n");
        for v in &self.whites {
            s += &format!("  \"w{},{}\" [pos=\"{},{}!\", color=gray];\n", v.0, v.1, v.0, v.1);
        }
        for v in &self.blacks {
            s += &format!("  \"b{},{}\" [pos=\"{},{}!\"];\n", v.0, v.1, v.0, v.1);
        }
        for e in &self.edges {
            s += &format!(
                "  \"b{},{}\" -- \"w{},{}\" [label=\"{}\"];\n",
                e.black.0,
                e.black.1,
                e.white.0,
                e.white.1,
                rational_to_string(&e.weight)
            );
        }
        s + "}\n"
    }
}

/// Weight of the edge from black `(2i, 2j+1)` to `white`: `a_{i,j}` to the
/// north-east, `b_{i,j}` to the south-east and 1 to the west.
fn gauge_weight(w: &WeightField, bl: Coord, wh: Coord) -> Rational {
    let (i, j) = (bl.0 / 2, (bl.1 - 1).div_euclid(2));
    match (wh.0 - bl.0, wh.1 - bl.1) {
        (1, 1) => w.a(i, j).clone(),
        (1, -1) => w.b(i, j).clone(),
        _ => Rational::one(),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("size n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Aztec diamond of size `n`. Needs `a`, `b` for `0 ≤ i, j ≤ n-1`.
pub fn build_aztec(n: usize, w: &WeightField) -> Result<AztecGraph> {
    check_n(n)?;
    w.require(0, n as i64 - 1, 0, n as i64 - 1)?;
    let m = n * (n + 1);
    DimerGraph::new(
        Flavor::Aztec { n },
        (1..=m).map(|i| aztec_white(n, i)).collect(),
        (1..=m).map(|i| aztec_black(n, i)).collect(),
        |b, wh| gauge_weight(w, b, wh),
    )
}

/// Aztec diamond whose edges carry labels `(r1, r2, r3, r4)` per even face
/// `(i, j)`, `0 ≤ i, j ≤ n-1`, for its NE, SE, SW and NW edges.
pub fn build_aztec_labeled(n: usize, labels: &BTreeMap<Coord, [Rational; 4]>) -> Result<AztecGraph> {
    check_n(n)?;
    let m = n * (n + 1);
    let mut missing = None;
    let g = DimerGraph::new(
        Flavor::Aztec { n },
        (1..=m).map(|i| aztec_white(n, i)).collect(),
        (1..=m).map(|i| aztec_black(n, i)).collect(),
        |b, wh| {
            let (i, j) = (b.0 / 2, (b.1 - 1) / 2);
            let (face, slot) = match (wh.0 - b.0, wh.1 - b.1) {
                (1, 1) => ((i, j), 3),
                (1, -1) => ((i, j), 2),
                (-1, -1) => ((i - 1, j), 1),
                _ => ((i - 1, j), 0),
            };
            match labels.get(&face) {
                Some(r) => r[slot].clone(),
                None => {
                    missing = Some(face);
                    Rational::one()
                }
            }
        },
    )?;
    match missing {
        Some(f) => Err(Error::Extent(format!("no edge labels for face {f:?}"))),
        None => Ok(g),
    }
}

/// Tower Aztec diamond of size `n` with corridor `p`. Needs `a`, `b` for
/// `0 ≤ i ≤ n-1`, `-(n+p) ≤ j ≤ n-1`.
pub fn build_tower(n: usize, p: usize, w: &WeightField) -> Result<TowerGraph> {
    check_n(n)?;
    w.require(0, n as i64 - 1, -((n + p) as i64), n as i64 - 1)?;
    let m = n * (2 * n + p);
    DimerGraph::new(
        Flavor::Tower { n, p },
        (1..=m).map(|i| tower_white(n, p, i)).collect(),
        (1..=m).map(|i| tower_black(n, p, i)).collect(),
        |b, wh| gauge_weight(w, b, wh),
    )
}

/// A perfect matching, as the white partner of every black vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Tiling {
    /// `white_of[k]` is the 0-based white index matched to black `k`.
    pub white_of: Vec<usize>,
}

impl Tiling {
    pub fn pairs(&self, g: &DimerGraph) -> Vec<(Coord, Coord)> {
        self.white_of.iter().enumerate().map(|(b, &w)| (g.blacks[b], g.whites[w])).collect()
    }

    pub fn weight(&self, g: &DimerGraph) -> Result<Rational> {
        let mut total = Rational::one();
        for (b, w) in self.pairs(g) {
            total *= &g.edge(b, w).ok_or_else(|| Error::Consistency(format!("{b:?}-{w:?} is not an edge")))?.weight;
        }
        Ok(total)
    }

    /// Builds from `(black, white)` pairs; checks the bijection.
    pub fn from_pairs(g: &DimerGraph, pairs: &[(Coord, Coord)]) -> Result<Self> {
        let mut white_of = vec![usize::MAX; g.size()];
        let mut used = vec![false; g.size()];
        for &(b, w) in pairs {
            let bi = g.black_index(b).ok_or_else(|| Error::Consistency(format!("{b:?} is not black")))?;
            let wi = g.white_index(w).ok_or_else(|| Error::Consistency(format!("{w:?} is not white")))?;
            if g.edge(b, w).is_none() {
                return Err(Error::Consistency(format!("{b:?}-{w:?} is not an edge")));
            }
            if white_of[bi] != usize::MAX || used[wi] {
                return Err(Error::Consistency(format!("vertex repeated in {b:?}-{w:?}")));
            }
            white_of[bi] = wi;
            used[wi] = true;
        }
        if white_of.contains(&usize::MAX) {
            return Err(Error::Consistency("matching is not perfect".into()));
        }
        Ok(Tiling { white_of })
    }
}

/// Number of perfect matchings, from a unit-weight Kasteleyn determinant.
pub fn matching_count(g: &DimerGraph) -> Result<Rational> {
    let unit = DimerGraph::new(g.flavor, g.whites.clone(), g.blacks.clone(), |_, _| Rational::one())?;
    let k = crate::kasteleyn::kasteleyn_matrix(&unit);
    Ok(k.matrix.det()?.norm_sqr().sqrt_exact())
}

trait SqrtExact {
    fn sqrt_exact(&self) -> Rational;
}

impl SqrtExact for Rational {
    fn sqrt_exact(&self) -> Rational {
        // integer square of an integer count
        let n = self.to_integer();
        Rational::from_integer(n.sqrt())
    }
}

/// All perfect matchings with their weights, ordered lexicographically by
/// the white partners of the blacks in ordering order.
pub fn enumerate_tilings(g: &DimerGraph, guard: u64) -> Result<Vec<(Tiling, Rational)>> {
    let count = matching_count(g)?;
    if count > Rational::from_integer(guard.into()) {
        return Err(Error::Capacity(format!("{} matchings exceed the enumeration guard {guard}", rational_to_string(&count))));
    }
    let nb = g.size();
    let options: Vec<Vec<(usize, Rational)>> = (0..nb)
        .map(|b| {
            let mut o: Vec<(usize, Rational)> = g.incident(b).map(|e| (g.white_index(e.white).unwrap(), e.weight.clone())).collect();
            o.sort_by_key(|x| x.0);
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; nb];
    let mut current = Vec::with_capacity(nb);
    fn rec(
        k: usize,
        options: &[Vec<(usize, Rational)>],
        used: &mut [bool],
        current: &mut Vec<usize>,
        weight: Rational,
        out: &mut Vec<(Tiling, Rational)>,
    ) {
        if k == options.len() {
            out.push((Tiling { white_of: current.clone() }, weight));
            return;
        }
        for (w, x) in &options[k] {
            if !used[*w] {
                used[*w] = true;
                current.push(*w);
                rec(k + 1, options, used, current, &weight * x, out);
                current.pop();
                used[*w] = false;
            }
        }
    }
    rec(0, &options, &mut used, &mut current, Rational::one(), &mut out);
    Ok(out)
}

/// Non-intersecting lattice paths of a tiling with their total weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSystem {
    /// Vertex sequences; for the tower these live on the refined graph
    /// whose vertex `(2i, j)` stands for black `(2i, 2j+1)`.
    pub paths: Vec<Vec<Coord>>,
    #[serde(with = "crate::numerics::serde_rational")]
    pub weight: Rational,
}

impl PathSystem {
    /// Lowest vertex of every path in column `m` (refined paths only).
    pub fn points(&self, m: i64) -> Vec<i64> {
        self.paths.iter().filter_map(|path| path.iter().filter(|v| v.0 == m).map(|v| v.1).min()).collect()
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in self.paths.iter().flatten() {
            if !seen.insert(*v) {
                return Err(Error::Consistency(format!("paths meet at {v:?}")));
            }
        }
        Ok(())
    }
}

/// Path system of a tiling. Aztec tilings give DR paths from `(0, 2k-1)`,
/// `k = 1..n`, to the row `y = -1`. Tower tilings give refined paths from
/// `(0, n-j)` to `(2n, -j)`, `j = 1..n+p`, with a horizontal half-step
/// after every DR step.
pub fn tiling_to_paths(g: &DimerGraph, t: &Tiling) -> Result<PathSystem> {
    let pairs = t.pairs(g);
    let checked = Tiling::from_pairs(g, &pairs)?;
    let weight = checked.weight(g)?;
    let tower = matches!(g.flavor, Flavor::Tower { .. });
    let mut next: HashMap<Coord, Vec<Coord>> = HashMap::new();
    for &(b, w) in &pairs {
        let (x, y) = b;
        let h = (y - 1).div_euclid(2);
        let steps = match (w.0 - x, w.1 - y) {
            (1, -1) if tower => vec![(x + 1, h - 1), (x + 2, h - 1)],
            (1, 1) if tower => vec![(x + 1, h), (x + 2, h)],
            (-1, -1) if tower => vec![(x, h - 1)],
            (1, -1) => vec![(x + 2, y - 2)],
            (1, 1) => vec![(x + 2, y)],
            (-1, -1) => vec![(x, y - 2)],
            _ => continue,
        };
        let from = if tower { (x, h) } else { b };
        next.insert(from, steps);
    }
    let n = g.flavor.n() as i64;
    let (starts, at_end): (Vec<Coord>, Box<dyn Fn(Coord) -> bool>) = match g.flavor {
        Flavor::Aztec { n } => ((1..=n as i64).map(|k| (0, 2 * k - 1)).collect(), Box::new(|v: Coord| v.1 == -1)),
        Flavor::Tower { n, p } => {
            let n = n as i64;
            ((1..=(n + p as i64)).map(|j| (0, n - j)).collect(), Box::new(move |v: Coord| v.0 == 2 * n && v.1 < 0))
        }
    };
    let mut paths = Vec::new();
    let mut used_steps = 0;
    for s in starts {
        let mut path = vec![s];
        let mut v = s;
        while let Some(steps) = next.get(&v) {
            used_steps += 1;
            path.extend_from_slice(steps);
            v = *steps.last().unwrap();
            if path.len() > 8 * g.size() + 8 {
                return Err(Error::Consistency("path does not terminate".into()));
            }
        }
        if !at_end(v) {
            return Err(Error::Consistency(format!("path from {s:?} stops at {v:?}")));
        }
        if tower && v.0 != 2 * n {
            return Err(Error::Consistency(format!("path from {s:?} ends off the last column")));
        }
        paths.push(path);
    }
    if used_steps != next.len() {
        return Err(Error::Consistency("tiling has path steps outside the path system".into()));
    }
    let sys = PathSystem { paths, weight };
    sys.check_disjoint()?;
    Ok(sys)
}

/// A weighted directed acyclic graph whose edges point right or down.
#[derive(Clone, Debug, Default)]
pub struct DrGraph {
    pub vertices: BTreeSet<Coord>,
    pub edges: Vec<(Coord, Coord, Rational)>,
}

impl DrGraph {
    /// The DR graph of a dimer graph: every black vertex `(x, y)` has an
    /// edge to `(x+2, y-2)` carrying its south-east weight, to `(x+2, y)`
    /// carrying its north-east weight and to `(x, y-2)` carrying its
    /// south-west weight, whenever the dimer edge exists.
    pub fn from_dimer_graph(g: &DimerGraph) -> DrGraph {
        let mut d = DrGraph::default();
        for e in &g.edges {
            let (x, y) = e.black;
            let to = match (e.white.0 - x, e.white.1 - y) {
                (1, -1) => (x + 2, y - 2),
                (1, 1) => (x + 2, y),
                (-1, -1) => (x, y - 2),
                _ => continue,
            };
            d.vertices.insert(e.black);
            d.vertices.insert(to);
            d.edges.push((e.black, to, e.weight.clone()));
        }
        d
    }

    /// Start and end points of the non-trivial paths: `(starts, ends)`.
    pub fn endpoints(flavor: Flavor) -> (Vec<Coord>, Vec<Coord>) {
        match flavor {
            Flavor::Aztec { n } => {
                let n = n as i64;
                ((1..=n).map(|i| (0, 2 * i - 1)).collect(), (1..=n).map(|j| (2 * j, -1)).collect())
            }
            Flavor::Tower { n, p } => {
                let (n, m) = (n as i64, (n + p) as i64);
                ((1..=m).map(|i| (0, 2 * n + 1 - 2 * i)).collect(), (1..=m).map(|j| (2 * n, 1 - 2 * j)).collect())
            }
        }
    }
}

/// Weighted number of directed paths from `start` to `end`.
pub fn count_paths_dr(g: &DrGraph, start: Coord, end: Coord) -> Rational {
    if start == end {
        return Rational::one();
    }
    let mut out: BTreeMap<Coord, Vec<(Coord, &Rational)>> = BTreeMap::new();
    for (u, v, w) in &g.edges {
        out.entry(*u).or_default().push((*v, w));
    }
    // topological order: x ascending, then y descending
    let mut order: Vec<Coord> = g.vertices.iter().copied().collect();
    order.sort_by_key(|v| (v.0, -v.1));
    let mut total: HashMap<Coord, Rational> = HashMap::new();
    total.insert(start, Rational::one());
    for v in order {
        let Some(t) = total.get(&v).cloned() else { continue };
        if let Some(list) = out.get(&v) {
            for (u, w) in list {
                let e = total.entry(*u).or_insert_with(Rational::zero);
                *e += &t * *w;
            }
        }
    }
    total.remove(&end).unwrap_or_else(Rational::zero)
}

/// `w_{ij}` = weighted DR path count from start `i` to end `j`.
pub fn lgv_matrix(g: &DimerGraph) -> crate::numerics::RationalMatrix {
    let d = DrGraph::from_dimer_graph(g);
    let (starts, ends) = DrGraph::endpoints(g.flavor);
    crate::numerics::Matrix::from_fn(starts.len(), ends.len(), |i, j| count_paths_dr(&d, starts[i], ends[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::int;

    #[test]
    fn aztec_one_orderings() {
        assert_eq!((aztec_white(1, 1), aztec_white(1, 2)), ((1, 0), (1, 2)));
        assert_eq!((aztec_black(1, 1), aztec_black(1, 2)), ((0, 1), (2, 1)));
    }

    #[test]
    fn tower_first_whites_on_one_column() {
        for i in 1..=7 {
            assert_eq!(tower_white(3, 4, i).0, 5);
        }
    }

    #[test]
    fn aztec_one_tilings() {
        let w = WeightField::window_from_fn(0, 0, 0, 0, |_, _| (int(3), int(5))).unwrap();
        let g = build_aztec(1, &w).unwrap();
        let t = enumerate_tilings(&g, DEFAULT_TILING_GUARD).unwrap();
        let mut ws: Vec<Rational> = t.iter().map(|x| x.1.clone()).collect();
        ws.sort();
        assert_eq!(ws, vec![int(3), int(5)]);
    }

    #[test]
    fn diagonal_path_for_aztec_one() {
        let g = build_aztec(1, &WeightField::uniform()).unwrap();
        let t = Tiling::from_pairs(&g, &[((0, 1), (1, 0)), ((2, 1), (1, 2))]).unwrap();
        let s = tiling_to_paths(&g, &t).unwrap();
        assert_eq!(s.paths, vec![vec![(0, 1), (2, -1)]]);
    }

    #[test]
    fn two_paths_for_aztec_one() {
        let w = WeightField::window_from_fn(0, 0, 0, 0, |_, _| (int(3), int(5))).unwrap();
        let g = build_aztec(1, &w).unwrap();
        let d = DrGraph::from_dimer_graph(&g);
        assert_eq!(count_paths_dr(&d, (0, 1), (2, -1)), int(8));
        assert_eq!(count_paths_dr(&d, (0, 1), (0, 1)), int(1));
    }

    #[test]
    fn guard_refuses_large_graphs() {
        let g = build_aztec(4, &WeightField::uniform()).unwrap();
        assert!(matches!(enumerate_tilings(&g, 100), Err(Error::Capacity(_))));
    }

    #[test]
    fn missing_weights_are_an_extent_error() {
        let w = WeightField::window_from_fn(0, 0, 0, 0, |_, _| (int(1), int(1))).unwrap();
        assert!(matches!(build_aztec(2, &w), Err(Error::Extent(_))));
    }
}
