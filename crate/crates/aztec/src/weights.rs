//! Edge weights `a_{i,j}`, `b_{i,j}` and face weights.
//!
//! The black vertex `(2i, 2j+1)` has four edges. Its two west edges carry
//! weight 1, the edge to `(2i+1, 2j+2)` carries `a_{i,j}` and the edge to
//! `(2i+1, 2j)` carries `b_{i,j}`. Face weights are
//! `F_{2i,j} = a_{i,j}/b_{i,j}` and `F_{2i+1,j} = b_{i+1,j+1}/a_{i+1,j}`.

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, rational_to_string, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Index set of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Extent {
    /// Inclusive ranges of `i` and `j`.
    Window { i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64 },
    /// `q` columns horizontally, `p` rows vertically.
    Periodic { q: usize, p: usize },
}

/// Lattice coordinate.
pub type Coord = (i64, i64);

fn reduce(periodic: Option<(usize, usize)>, (i, j): Coord, i_period_scale: i64) -> Coord {
    match periodic {
        Some((q, p)) => (i.rem_euclid(q as i64 * i_period_scale), j.rem_euclid(p as i64)),
        None => (i, j),
    }
}

/// The parameters `a_{i,j}`, `b_{i,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    extent: Extent,
    a: BTreeMap<Coord, Rational>,
    b: BTreeMap<Coord, Rational>,
}

impl WeightField {
    fn periodic_dims(&self) -> Option<(usize, usize)> {
        match self.extent {
            Extent::Periodic { q, p } => Some((q, p)),
            Extent::Window { .. } => None,
        }
    }

    fn build(extent: Extent, mut f: impl FnMut(i64, i64) -> (Rational, Rational)) -> Result<Self> {
        let (ir, jr) = match extent {
            Extent::Window { i_lo, i_hi, j_lo, j_hi } => {
                if i_hi < i_lo || j_hi < j_lo {
                    return Err(Error::Extent(format!("empty window {extent:?}")));
                }
                (i_lo..=i_hi, j_lo..=j_hi)
            }
            Extent::Periodic { q, p } => {
                if q == 0 || p == 0 {
                    return Err(Error::Extent("periods must be positive".into()));
                }
                (0..=q as i64 - 1, 0..=p as i64 - 1)
            }
        };
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for i in ir {
            for j in jr.clone() {
                let (x, y) = f(i, j);
                if !x.is_positive() || !y.is_positive() {
                    return Err(Error::Domain(format!("weights at ({i},{j}) must be positive")));
                }
                a.insert((i, j), x);
                b.insert((i, j), y);
            }
        }
        Ok(WeightField { extent, a, b })
    }

    /// Window field from a function of `(i, j)` returning `(a, b)`.
    pub fn window_from_fn(i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64, f: impl FnMut(i64, i64) -> (Rational, Rational)) -> Result<Self> {
        Self::build(Extent::Window { i_lo, i_hi, j_lo, j_hi }, f)
    }

    /// Periodic field from one period; `a[i][j]` for `0 ≤ i < q`, `0 ≤ j < p`.
    pub fn periodic(a: Vec<Vec<Rational>>, b: Vec<Vec<Rational>>) -> Result<Self> {
        let q = a.len();
        let p = a.first().map_or(0, Vec::len);
        if b.len() != q || a.iter().chain(&b).any(|r| r.len() != p) {
            return Err(Error::Dimension("periodic a and b must both be q×p".into()));
        }
        Self::build(Extent::Periodic { q, p }, |i, j| (a[i as usize][j as usize].clone(), b[i as usize][j as usize].clone()))
    }

    /// Constant weights `a`, `b` as a 1×1 periodic field.
    pub fn constant(a: Rational, b: Rational) -> Result<Self> {
        Self::periodic(vec![vec![a]], vec![vec![b]])
    }

    pub fn uniform() -> Self {
        Self::constant(Rational::one(), Rational::one()).expect("positive")
    }

    /// Seeded random window with entries `k/d`, `1 ≤ k ≤ 9`, `1 ≤ d ≤ 4`.
    pub fn random_window<R: Rng>(rng: &mut R, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> Self {
        Self::window_from_fn(i_lo, i_hi, j_lo, j_hi, |_, _| (random_rational(rng), random_rational(rng)))
            .expect("random weights are positive")
    }

    pub fn random_periodic<R: Rng>(rng: &mut R, q: usize, p: usize) -> Self {
        Self::build(Extent::Periodic { q, p }, |_, _| (random_rational(rng), random_rational(rng))).expect("random weights are positive")
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic_dims().is_some()
    }

    pub fn get_a(&self, i: i64, j: i64) -> Option<&Rational> {
        self.a.get(&reduce(self.periodic_dims(), (i, j), 1))
    }

    pub fn get_b(&self, i: i64, j: i64) -> Option<&Rational> {
        self.b.get(&reduce(self.periodic_dims(), (i, j), 1))
    }

    /// Panics outside the extent; callers check coverage first.
    pub fn a(&self, i: i64, j: i64) -> &Rational {
        self.get_a(i, j).unwrap_or_else(|| panic!("a_({i},{j}) outside {:?}", self.extent))
    }

    /// Panics outside the extent; callers check coverage first.
    pub fn b(&self, i: i64, j: i64) -> &Rational {
        self.get_b(i, j).unwrap_or_else(|| panic!("b_({i},{j}) outside {:?}", self.extent))
    }

    pub fn covers(&self, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> bool {
        match self.extent {
            Extent::Periodic { .. } => true,
            Extent::Window { i_lo: a, i_hi: b, j_lo: c, j_hi: d } => {
                i_lo > i_hi || j_lo > j_hi || (a <= i_lo && i_hi <= b && c <= j_lo && j_hi <= d)
            }
        }
    }

    /// Extent error unless the rectangle is covered.
    pub fn require(&self, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> Result<()> {
        if self.covers(i_lo, i_hi, j_lo, j_hi) {
            Ok(())
        } else {
            Err(Error::Extent(format!("weights cover {:?}, need i in [{i_lo},{i_hi}], j in [{j_lo},{j_hi}]", self.extent)))
        }
    }

    /// Copy restricted to a window (periodic fields are unrolled).
    pub fn restrict(&self, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> Result<Self> {
        self.require(i_lo, i_hi, j_lo, j_hi)?;
        Self::window_from_fn(i_lo, i_hi, j_lo, j_hi, |i, j| (self.a(i, j).clone(), self.b(i, j).clone()))
    }

    /// Stored `(i, j)` keys; one period for periodic fields.
    pub fn keys(&self) -> impl Iterator<Item = Coord> + '_ {
        self.a.keys().copied()
    }

    pub fn to_file(&self) -> WeightFieldFile {
        let (ir, jr) = match self.extent {
            Extent::Window { i_lo, i_hi, j_lo, j_hi } => (i_lo..=i_hi, j_lo..=j_hi),
            Extent::Periodic { q, p } => (0..=q as i64 - 1, 0..=p as i64 - 1),
        };
        let grid = |m: &BTreeMap<Coord, Rational>| -> Vec<Vec<String>> {
            ir.clone().map(|i| jr.clone().map(|j| rational_to_string(&m[&(i, j)])).collect()).collect()
        };
        WeightFieldFile { extent: self.extent, a: grid(&self.a), b: grid(&self.b) }
    }

    pub fn from_file(file: &WeightFieldFile) -> Result<Self> {
        let parse = |g: &Vec<Vec<String>>| -> Result<Vec<Vec<Rational>>> {
            g.iter().map(|row| row.iter().map(|s| parse_rational(s)).collect()).collect()
        };
        let (a, b) = (parse(&file.a)?, parse(&file.b)?);
        let (i0, j0, ni, nj) = match file.extent {
            Extent::Window { i_lo, i_hi, j_lo, j_hi } => (i_lo, j_lo, (i_hi - i_lo + 1).max(0) as usize, (j_hi - j_lo + 1).max(0) as usize),
            Extent::Periodic { q, p } => (0, 0, q, p),
        };
        if a.len() != ni || b.len() != ni || a.iter().chain(&b).any(|r| r.len() != nj) {
            return Err(Error::Dimension(format!("weight grids must be {ni}×{nj} for {:?}", file.extent)));
        }
        Self::build(file.extent, |i, j| {
            let (r, c) = ((i - i0) as usize, (j - j0) as usize);
            (a[r][c].clone(), b[r][c].clone())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: WeightFieldFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&f)
    }
}

/// On-disk layout: `a[i - i_origin][j - j_origin]` as rational strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightFieldFile {
    pub extent: Extent,
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
}

/// A random positive rational `k/d` with `1 ≤ k ≤ 9`, `1 ≤ d ≤ 4`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    crate::numerics::rat(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

/// Face weights `F_{k,j}`: even `k` for the faces between columns of black
/// vertices, odd `k` for the faces in between.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceField {
    periodic: Option<(usize, usize)>,
    values: BTreeMap<Coord, Rational>,
}

impl FaceField {
    /// Periodic field of horizontal weight period `q`, i.e. face period `2q`.
    pub fn periodic_from_fn(q: usize, p: usize, mut f: impl FnMut(i64, i64) -> Rational) -> Self {
        let mut values = BTreeMap::new();
        for k in 0..2 * q as i64 {
            for j in 0..p as i64 {
                values.insert((k, j), f(k, j));
            }
        }
        FaceField { periodic: Some((q, p)), values }
    }

    pub fn from_map(values: BTreeMap<Coord, Rational>) -> Self {
        FaceField { periodic: None, values }
    }

    pub fn periodic_dims(&self) -> Option<(usize, usize)> {
        self.periodic
    }

    pub fn get(&self, k: i64, j: i64) -> Option<&Rational> {
        self.values.get(&reduce(self.periodic, (k, j), 2))
    }

    /// Stored keys; one period for periodic fields.
    pub fn keys(&self) -> impl Iterator<Item = Coord> + '_ {
        self.values.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &BTreeMap<Coord, Rational> {
        &self.values
    }

    /// Compares two fields on the keys both define. Returns the number of
    /// faces compared and the first differing face, if any.
    pub fn compare(&self, other: &FaceField) -> (usize, Option<Coord>) {
        let mut n = 0;
        for (key, v) in &self.values {
            if let Some(w) = other.get(key.0, key.1) {
                n += 1;
                if v != w {
                    return (n, Some(*key));
                }
            }
        }
        (n, None)
    }

    /// Same field with every key shifted by `(dk, dj)`; periodic fields
    /// stay periodic.
    pub fn shifted(&self, dk: i64, dj: i64) -> FaceField {
        match self.periodic {
            Some((q, p)) => FaceField::periodic_from_fn(q, p, |k, j| self.get(k - dk, j - dj).unwrap().clone()),
            None => FaceField { periodic: None, values: self.values.iter().map(|(&(k, j), v)| ((k + dk, j + dj), v.clone())).collect() },
        }
    }
}

/// `F_{2i,j} = a_{i,j}/b_{i,j}`, `F_{2i+1,j} = b_{i+1,j+1}/a_{i+1,j}`.
pub fn faces_from_weights(w: &WeightField) -> FaceField {
    let even = |i: i64, j: i64| w.a(i, j) / w.b(i, j);
    let odd = |i: i64, j: i64| w.b(i + 1, j + 1) / w.a(i + 1, j);
    match w.extent {
        Extent::Periodic { q, p } => {
            FaceField::periodic_from_fn(q, p, |k, j| if k % 2 == 0 { even(k / 2, j) } else { odd((k - 1) / 2, j) })
        }
        Extent::Window { i_lo, i_hi, j_lo, j_hi } => {
            let mut values = BTreeMap::new();
            for i in i_lo..=i_hi {
                for j in j_lo..=j_hi {
                    values.insert((2 * i, j), even(i, j));
                    if i < i_hi && j < j_hi {
                        values.insert((2 * i + 1, j), odd(i, j));
                    }
                }
            }
            FaceField::from_map(values)
        }
    }
}

/// Gauge choice for [`weights_from_faces`]: `b_{i,j0}` per column, default 1.
#[derive(Clone, Debug, Default)]
pub struct SeedRow {
    pub j0: i64,
    pub values: BTreeMap<i64, Rational>,
}

impl SeedRow {
    fn seed(&self, i: i64) -> Rational {
        self.values.get(&i).cloned().unwrap_or_else(Rational::one)
    }
}

/// Rebuilds edge weights from faces. Within column `i`,
/// `b_{i,j+1} = F_{2i-1,j}·a_{i,j}` and `a_{i,j} = F_{2i,j}·b_{i,j}`, starting
/// from the seed row. A window's leftmost column has no odd faces to its
/// left and keeps `b` constant.
pub fn weights_from_faces(f: &FaceField, seed: &SeedRow) -> Result<WeightField> {
    match f.periodic {
        Some((q, p)) => {
            let mut a = vec![vec![Rational::zero(); p]; q];
            let mut b = vec![vec![Rational::zero(); p]; q];
            let j0 = seed.j0;
            for (i, (acol, bcol)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                let i = i as i64;
                let mut bj = seed.seed(i);
                let start = bj.clone();
                for t in 0..p as i64 {
                    let j = j0 + t;
                    let aj = f.get(2 * i, j).unwrap() * &bj;
                    let jr = j.rem_euclid(p as i64) as usize;
                    bcol[jr] = bj.clone();
                    acol[jr] = aj.clone();
                    bj = f.get(2 * i - 1, j).unwrap() * &aj;
                }
                if bj != start {
                    return Err(Error::Structural(format!(
                        "column {i}: face products do not close over one period; no periodic gauge exists"
                    )));
                }
            }
            WeightField::periodic(a, b)
        }
        None => {
            let evens: Vec<Coord> = f.values.keys().filter(|(k, _)| k % 2 == 0).copied().collect();
            if evens.is_empty() {
                return Err(Error::Extent("face field has no even faces".into()));
            }
            let i_lo = evens.iter().map(|c| c.0 / 2).min().unwrap();
            let i_hi = evens.iter().map(|c| c.0 / 2).max().unwrap();
            let j_lo = evens.iter().map(|c| c.1).min().unwrap();
            let j_hi = evens.iter().map(|c| c.1).max().unwrap();
            if j_hi == j_lo {
                return Err(Error::Extent("degenerate window: height below 2".into()));
            }
            if !(j_lo..=j_hi).contains(&seed.j0) {
                return Err(Error::Extent(format!("seed row {} outside [{j_lo},{j_hi}]", seed.j0)));
            }
            let face =
                |k: i64, j: i64| -> Result<&Rational> { f.get(k, j).ok_or_else(|| Error::Extent(format!("missing face ({k},{j})"))) };
            let mut a = BTreeMap::new();
            let mut b = BTreeMap::new();
            for i in i_lo..=i_hi {
                let left = i > i_lo;
                let step = |j: i64| -> Result<Rational> {
                    // b_{i,j+1} / b_{i,j}
                    if left {
                        Ok(face(2 * i - 1, j)? * face(2 * i, j)?)
                    } else {
                        Ok(Rational::one())
                    }
                };
                b.insert((i, seed.j0), seed.seed(i));
                for j in seed.j0..j_hi {
                    let v = &b[&(i, j)] * step(j)?;
                    b.insert((i, j + 1), v);
                }
                for j in (j_lo..seed.j0).rev() {
                    let v = &b[&(i, j + 1)] / step(j)?;
                    b.insert((i, j), v);
                }
                for j in j_lo..=j_hi {
                    let v = face(2 * i, j)? * &b[&(i, j)];
                    a.insert((i, j), v);
                }
            }
            WeightField::window_from_fn(i_lo, i_hi, j_lo, j_hi, |i, j| (a[&(i, j)].clone(), b[&(i, j)].clone()))
        }
    }
}

/// Arbitrary positive weights on the four edges of each black vertex
/// `(2i, 2j+1)` of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct RawEdgeWeights {
    pub i_lo: i64,
    pub i_hi: i64,
    pub j_lo: i64,
    pub j_hi: i64,
    /// Keyed by `(black, white)`.
    pub edges: BTreeMap<(Coord, Coord), Rational>,
}

/// The four white neighbours of black `(x, y)`: NE, SE, SW, NW.
pub fn white_neighbours((x, y): Coord) -> [Coord; 4] {
    [(x + 1, y + 1), (x + 1, y - 1), (x - 1, y - 1), (x - 1, y + 1)]
}

impl RawEdgeWeights {
    /// `f(black, white)` for every edge of every black vertex in the window.
    pub fn from_fn(i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64, mut f: impl FnMut(Coord, Coord) -> Rational) -> Result<Self> {
        let mut edges = BTreeMap::new();
        for i in i_lo..=i_hi {
            for j in j_lo..=j_hi {
                let bl = (2 * i, 2 * j + 1);
                for wh in white_neighbours(bl) {
                    let v = f(bl, wh);
                    if !v.is_positive() {
                        return Err(Error::Domain(format!("edge {bl:?}-{wh:?} must be positive")));
                    }
                    edges.insert((bl, wh), v);
                }
            }
        }
        Ok(RawEdgeWeights { i_lo, i_hi, j_lo, j_hi, edges })
    }

    /// The raw weights of a weight field in its own gauge.
    pub fn from_weights(w: &WeightField, i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> Result<Self> {
        w.require(i_lo, i_hi, j_lo, j_hi)?;
        Self::from_fn(i_lo, i_hi, j_lo, j_hi, |(x, y), (u, v)| {
            let (i, j) = (x / 2, (y - 1) / 2);
            match (u - x, v - y) {
                (1, 1) => w.a(i, j).clone(),
                (1, -1) => w.b(i, j).clone(),
                _ => Rational::one(),
            }
        })
    }

    pub fn weight(&self, black: Coord, white: Coord) -> Option<&Rational> {
        self.edges.get(&(black, white))
    }

    /// Multiplies every edge at `v` by `s`; `v` may be black or white.
    pub fn scale_vertex(&mut self, v: Coord, s: &Rational) {
        let black = v.0.rem_euclid(2) == 0;
        for ((bl, wh), x) in self.edges.iter_mut() {
            if (black && *bl == v) || (!black && *wh == v) {
                *x = &*x * s;
            }
        }
    }

    /// Face weights of every face whose four edges lie in the window.
    pub fn faces(&self) -> FaceField {
        let w = |b: Coord, wh: Coord| self.weight(b, wh);
        let mut values = BTreeMap::new();
        for i in self.i_lo..=self.i_hi {
            for j in self.j_lo..=self.j_hi {
                // even face centred at (2i+1, 2j+1)
                let (bw, be) = ((2 * i, 2 * j + 1), (2 * i + 2, 2 * j + 1));
                let (wn, ws) = ((2 * i + 1, 2 * j + 2), (2 * i + 1, 2 * j));
                if let (Some(es), Some(wn_), Some(en), Some(ws_)) = (w(be, ws), w(bw, wn), w(be, wn), w(bw, ws)) {
                    values.insert((2 * i, j), es * wn_ / (en * ws_));
                }
                // odd face centred at (2i+2, 2j+2)
                let (bs, bn) = ((2 * i + 2, 2 * j + 1), (2 * i + 2, 2 * j + 3));
                let (ww, we) = ((2 * i + 1, 2 * j + 2), (2 * i + 3, 2 * j + 2));
                if let (Some(ne), Some(sw), Some(se), Some(nw)) = (w(bn, we), w(bs, ww), w(bs, we), w(bn, ww)) {
                    values.insert((2 * i + 1, j), ne * sw / (se * nw));
                }
            }
        }
        FaceField::from_map(values)
    }
}

/// Gauge transformations making both west edges of every black vertex 1.
/// Columns are swept left to right, rows bottom to top: each black vertex is
/// scaled to fix its SW edge, then its NW white neighbour to fix the NW edge.
pub fn gauge_normalize(raw: &RawEdgeWeights) -> Result<WeightField> {
    let mut g = raw.clone();
    for i in raw.i_lo..=raw.i_hi {
        for j in raw.j_lo..=raw.j_hi {
            let bl = (2 * i, 2 * j + 1);
            let [_, _, sw, nw] = white_neighbours(bl);
            let s = g.weight(bl, sw).unwrap().recip();
            g.scale_vertex(bl, &s);
            let t = g.weight(bl, nw).unwrap().recip();
            g.scale_vertex(nw, &t);
        }
    }
    WeightField::window_from_fn(raw.i_lo, raw.i_hi, raw.j_lo, raw.j_hi, |i, j| {
        let bl = (2 * i, 2 * j + 1);
        let [ne, se, _, _] = white_neighbours(bl);
        (g.weight(bl, ne).unwrap().clone(), g.weight(bl, se).unwrap().clone())
    })
}

/// Constants of the decay assumption on `∏ a/b` along columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// Prefactor with `∏_{m=j}^{j+k-1} a_{i,m}/b_{i,m} ≤ R ρ^k`.
    pub r: f64,
    pub rho: f64,
    #[serde(with = "crate::numerics::serde_rational")]
    pub delta1: Rational,
    #[serde(with = "crate::numerics::serde_rational")]
    pub delta2: Rational,
    /// Per-column `(∏ a/b)^{1/len}` over one period or the full window.
    pub column_rates: Vec<(i64, f64)>,
}

/// A run of `a/b` ratios whose product is at least 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub column: i64,
    pub j_start: i64,
    pub length: usize,
    #[serde(with = "crate::numerics::serde_rational")]
    pub product: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum AssumptionCheck {
    Holds(AssumptionReport),
    Violated(Violation),
}

impl AssumptionCheck {
    pub fn report(&self) -> Result<&AssumptionReport> {
        match self {
            AssumptionCheck::Holds(r) => Ok(r),
            AssumptionCheck::Violated(v) => Err(Error::Assumption(format!(
                "column {} rows {}..{}: product of a/b is {} >= 1",
                v.column,
                v.j_start,
                v.j_start + v.length as i64 - 1,
                rational_to_string(&v.product)
            ))),
        }
    }
}

/// Checks geometric decay of `∏ a/b` in each column `i` of `columns`.
/// Periodic fields use one vertical period; windows use the window height,
/// so the result is an estimate there.
pub fn check_assumption(w: &WeightField, columns: std::ops::Range<i64>) -> AssumptionCheck {
    let (j_lo, height) = match w.extent {
        Extent::Periodic { p, .. } => (0, p),
        Extent::Window { j_lo, j_hi, .. } => (j_lo, (j_hi - j_lo + 1) as usize),
    };
    let mut rates = Vec::new();
    let mut delta1: Option<Rational> = None;
    let mut delta2: Option<Rational> = None;
    for i in columns.clone() {
        let ratio = |j: i64| w.a(i, j) / w.b(i, j);
        let full: Rational = (0..height as i64).map(|t| ratio(j_lo + t)).product();
        if full >= Rational::one() {
            return AssumptionCheck::Violated(Violation { column: i, j_start: j_lo, length: height, product: full });
        }
        rates.push((i, to_f64(&full).powf(1.0 / height as f64)));
        for t in 0..height as i64 {
            let s = w.a(i, j_lo + t) + w.b(i, j_lo + t);
            if delta1.as_ref().is_none_or(|d| s < *d) {
                delta1 = Some(s.clone());
            }
            if delta2.as_ref().is_none_or(|d| s > *d) {
                delta2 = Some(s);
            }
        }
    }
    let rho = rates.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut r = 1.0f64;
    for i in columns {
        for j in 0..height as i64 {
            let mut prod = 1.0;
            let max_len = match w.extent {
                Extent::Periodic { .. } => height as i64,
                Extent::Window { .. } => height as i64 - j,
            };
            for k in 1..=max_len {
                prod *= to_f64(&(w.a(i, j_lo + j + k - 1) / w.b(i, j_lo + j + k - 1)));
                r = r.max(prod / rho.powi(k as i32));
            }
        }
    }
    AssumptionCheck::Holds(AssumptionReport {
        r,
        rho,
        delta1: delta1.unwrap_or_else(Rational::zero),
        delta2: delta2.unwrap_or_else(Rational::zero),
        column_rates: rates,
    })
}
