//! Windowed transition operators and the finite Eynard-Mehta kernel.
//!
//! An operator on `ℓ(ℤ)` is stored on a window `[lo, hi]`. Every entry
//! carries an exactness flag telling whether it equals the entry of the
//! infinite operator. Band offsets bound the nonzero pattern: `(j, k)` can
//! be nonzero only if `j - k ≤ lower` and `k - j ≤ upper`; `None` means
//! unbounded.

use crate::error::{Error, Result};
use crate::graphs::DrGraph;
use crate::numerics::{rational_to_string, Rational, RationalMatrix};
use crate::weights::WeightField;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Banded { lower: i64, upper: i64 },
    Lower,
    Upper,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowedOperator {
    lo: i64,
    hi: i64,
    entries: RationalMatrix,
    exact: Vec<bool>,
    lower: Option<i64>,
    upper: Option<i64>,
}

fn size(lo: i64, hi: i64) -> Result<usize> {
    if hi < lo {
        return Err(Error::Extent(format!("empty window [{lo}, {hi}]")));
    }
    Ok((hi - lo + 1) as usize)
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

impl WindowedOperator {
    /// Operator whose window entries are `f(j, k)`, all exact.
    pub fn from_fn(lo: i64, hi: i64, lower: Option<i64>, upper: Option<i64>, mut f: impl FnMut(i64, i64) -> Rational) -> Result<Self> {
        let n = size(lo, hi)?;
        let entries = RationalMatrix::from_fn(n, n, |r, c| {
            let (j, k) = (lo + r as i64, lo + c as i64);
            if lower.is_some_and(|l| j - k > l) || upper.is_some_and(|u| k - j > u) {
                Rational::zero()
            } else {
                f(j, k)
            }
        });
        Ok(WindowedOperator { lo, hi, entries, exact: vec![true; n * n], lower, upper })
    }

    pub fn identity(lo: i64, hi: i64) -> Result<Self> {
        Self::from_fn(lo, hi, Some(0), Some(0), |_, _| Rational::one())
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn bands(&self) -> (Option<i64>, Option<i64>) {
        (self.lower, self.upper)
    }

    pub fn structure(&self) -> Structure {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => Structure::Banded { lower: l, upper: u },
            (None, Some(u)) if u <= 0 => Structure::Lower,
            (Some(l), None) if l <= 0 => Structure::Upper,
            _ => Structure::General,
        }
    }

    /// Checks that no stored nonzero lies outside the band.
    pub fn verify_structure(&self) -> bool {
        (self.lo..=self.hi).all(|j| {
            (self.lo..=self.hi).all(|k| {
                let outside = self.lower.is_some_and(|l| j - k > l) || self.upper.is_some_and(|u| k - j > u);
                !outside || self.raw(j, k).is_zero()
            })
        })
    }

    fn pos(&self, j: i64) -> Option<usize> {
        (self.lo..=self.hi).contains(&j).then(|| (j - self.lo) as usize)
    }

    fn raw(&self, j: i64, k: i64) -> &Rational {
        self.entries.get((j - self.lo) as usize, (k - self.lo) as usize)
    }

    /// `true` when `(j, k)` is known to vanish or is stored exactly.
    pub fn is_exact(&self, j: i64, k: i64) -> bool {
        if self.outside_band(j, k) {
            return true;
        }
        match (self.pos(j), self.pos(k)) {
            (Some(r), Some(c)) => self.exact[r * self.entries.cols() + c],
            _ => false,
        }
    }

    fn outside_band(&self, j: i64, k: i64) -> bool {
        self.lower.is_some_and(|l| j - k > l) || self.upper.is_some_and(|u| k - j > u)
    }

    /// Certified entry of the infinite operator.
    pub fn entry(&self, j: i64, k: i64) -> Result<Rational> {
        if self.outside_band(j, k) {
            return Ok(Rational::zero());
        }
        if !self.is_exact(j, k) {
            return Err(Error::Extent(format!("entry ({j}, {k}) is not certified on window [{}, {}]", self.lo, self.hi)));
        }
        Ok(self.raw(j, k).clone())
    }

    /// Stored window entry, certified or not; zero outside the window.
    pub fn window_entry(&self, j: i64, k: i64) -> Rational {
        match (self.pos(j), self.pos(k)) {
            (Some(r), Some(c)) => self.entries.get(r, c).clone(),
            _ => Rational::zero(),
        }
    }

    /// Largest `[a, b]` such that every `(j, k)` in `[a, b]²` is certified.
    pub fn certified_square(&self) -> Option<(i64, i64)> {
        let ok = |a: i64, b: i64| (a..=b).all(|j| (a..=b).all(|k| self.is_exact(j, k)));
        let mut best: Option<(i64, i64)> = None;
        for a in self.lo..=self.hi {
            let mut b = a;
            while b <= self.hi && ok(a, b) {
                b += 1;
            }
            if b > a && best.is_none_or(|(x, y)| b - 1 - a > y - x) {
                best = Some((a, b - 1));
            }
        }
        best
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.window() != other.window() {
            return Err(Error::Dimension(format!("windows [{}, {}] and [{}, {}] differ", self.lo, self.hi, other.lo, other.hi)));
        }
        let (lo, hi) = (self.lo, self.hi);
        let n = self.entries.rows();
        let entries = self.entries.mul(&other.entries)?;
        let mut exact = vec![false; n * n];
        for r in 0..n {
            let j = lo + r as i64;
            for c in 0..n {
                let k = lo + c as i64;
                // contributing middle indices of the infinite product
                let m_lo = [self.lower.map(|l| j - l), other.upper.map(|u| k - u)].into_iter().flatten().max();
                let m_hi = [self.upper.map(|u| j + u), other.lower.map(|l| k + l)].into_iter().flatten().min();
                exact[r * n + c] = match (m_lo, m_hi) {
                    (Some(a), Some(b)) if a > b => true,
                    (Some(a), Some(b)) if a >= lo && b <= hi => (a..=b).all(|m| self.is_exact(j, m) && other.is_exact(m, k)),
                    _ => false,
                };
            }
        }
        Ok(WindowedOperator { lo, hi, entries, exact, lower: add_opt(self.lower, other.lower), upper: add_opt(self.upper, other.upper) })
    }

    /// `self · S^{-n}`: column `k` of the result is column `k - n` of `self`.
    pub fn shift_columns(&self, n: i64) -> Self {
        let size = self.entries.rows();
        let mut entries = RationalMatrix::zeros(size, size);
        let mut exact = vec![false; size * size];
        for r in 0..size {
            for c in 0..size {
                let src = c as i64 - n;
                if (0..size as i64).contains(&src) {
                    entries[(r, c)] = self.entries.get(r, src as usize).clone();
                    exact[r * size + c] = self.exact[r * size + src as usize];
                }
            }
        }
        let mut out = WindowedOperator {
            lo: self.lo,
            hi: self.hi,
            entries,
            exact,
            lower: self.lower.map(|l| l - n),
            upper: self.upper.map(|u| u + n),
        };
        // entries known to vanish by the band stay exact
        for r in 0..size {
            for c in 0..size {
                let (j, k) = (self.lo + r as i64, self.lo + c as i64);
                if out.outside_band(j, k) {
                    out.exact[r * size + c] = true;
                }
            }
        }
        out
    }

    /// `S^n · self`: row `j` of the result is row `j - n` of `self`.
    pub fn shift_rows(&self, n: i64) -> Self {
        self.transpose().shift_columns(n).transpose()
    }

    fn transpose(&self) -> Self {
        let size = self.entries.rows();
        let mut exact = vec![false; size * size];
        for r in 0..size {
            for c in 0..size {
                exact[c * size + r] = self.exact[r * size + c];
            }
        }
        WindowedOperator { lo: self.lo, hi: self.hi, entries: self.entries.transpose(), exact, lower: self.upper, upper: self.lower }
    }

    /// Inverse of a lower triangular operator. Entry `(j, k)` depends only
    /// on entries with indices in `[k, j]`, so it is certified when those
    /// are.
    pub fn lower_inverse(&self) -> Result<Self> {
        if self.upper.is_none_or(|u| u > 0) {
            return Err(Error::Structural("operator is not lower triangular".into()));
        }
        let n = self.entries.rows();
        // uncertified diagonal entries only feed uncertified results
        let mut m = self.entries.clone();
        for r in 0..n {
            if !self.exact[r * n + r] {
                m[(r, r)] = Rational::one();
            }
        }
        let entries = m.triangular_inverse(crate::numerics::Orientation::Lower)?;
        let mut exact = vec![false; n * n];
        for c in 0..n {
            let mut ok = true;
            for r in c..n {
                ok = ok && (c..=r).all(|m| self.exact[r * n + m]);
                exact[r * n + c] = ok;
            }
            for r in 0..c {
                exact[r * n + c] = true;
            }
        }
        let lower = if self.lower == Some(0) { Some(0) } else { None };
        Ok(WindowedOperator { lo: self.lo, hi: self.hi, entries, exact, lower, upper: Some(0) })
    }

    /// Inverse of an upper triangular operator, certified like
    /// [`Self::lower_inverse`].
    pub fn upper_inverse(&self) -> Result<Self> {
        if self.lower.is_none_or(|l| l > 0) {
            return Err(Error::Structural("operator is not upper triangular".into()));
        }
        Ok(self.transpose().lower_inverse()?.transpose())
    }

    /// Certified entries on rows `[r_lo, r_hi]` and columns `[c_lo, c_hi]`.
    pub fn block(&self, r_lo: i64, r_hi: i64, c_lo: i64, c_hi: i64) -> Result<RationalMatrix> {
        let (rows, cols) = ((r_hi - r_lo + 1).max(0) as usize, (c_hi - c_lo + 1).max(0) as usize);
        let mut out = RationalMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self.entry(r_lo + r as i64, c_lo + c as i64)?;
            }
        }
        Ok(out)
    }

    /// Window entries as a dense matrix.
    pub fn matrix(&self) -> &RationalMatrix {
        &self.entries
    }

    /// Certified entries as strings, `null` where not certified.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<serde_json::Value>> = (self.lo..=self.hi)
            .map(|j| {
                (self.lo..=self.hi)
                    .map(|k| match self.entry(j, k) {
                        Ok(x) => serde_json::Value::String(rational_to_string(&x)),
                        Err(_) => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({ "lo": self.lo, "hi": self.hi, "entries": rows })
    }
}

fn coverage(what: &str, j: i64) -> Error {
    Error::Extent(format!("{what} parameter missing at row {j}"))
}

/// `D(a) + D(b)S`: `a_j` on the diagonal and `b_j` at `(j, j-1)`.
pub fn phi_operator(
    a: impl Fn(i64) -> Option<Rational>,
    b: impl Fn(i64) -> Option<Rational>,
    lo: i64,
    hi: i64,
) -> Result<WindowedOperator> {
    let mut missing = None;
    let op = WindowedOperator::from_fn(lo, hi, Some(1), Some(0), |j, k| {
        let v = if j == k { a(j) } else { b(j) };
        v.unwrap_or_else(|| {
            missing = Some(j);
            Rational::zero()
        })
    })?;
    match missing {
        Some(j) => Err(coverage("phi", j)),
        None => Ok(op),
    }
}

/// `Φ(a_i, b_i)` from column `i` of a weight field.
pub fn phi_column(w: &WeightField, i: i64, lo: i64, hi: i64) -> Result<WindowedOperator> {
    phi_operator(|j| w.get_a(i, j).cloned(), |j| w.get_b(i, j).cloned(), lo, hi)
}

/// `Ψ(j, k) = 1` for `k ≤ j`.
pub fn psi_operator(lo: i64, hi: i64) -> Result<WindowedOperator> {
    WindowedOperator::from_fn(lo, hi, None, Some(0), |_, _| Rational::one())
}

/// `Ψ⁻¹ = I - S`.
pub fn psi_inverse_operator(lo: i64, hi: i64) -> Result<WindowedOperator> {
    WindowedOperator::from_fn(lo, hi, Some(1), Some(0), |j, k| if j == k { Rational::one() } else { -Rational::one() })
}

/// `S^m`, with `S^m(j, j-m) = 1`.
pub fn shift_operator(m: i64, lo: i64, hi: i64) -> Result<WindowedOperator> {
    WindowedOperator::from_fn(lo, hi, Some(m), Some(-m), |_, _| Rational::one())
}

/// Diagonal operator `D(d)`.
pub fn diag_operator(d: impl Fn(i64) -> Option<Rational>, lo: i64, hi: i64) -> Result<WindowedOperator> {
    let mut missing = None;
    let op = WindowedOperator::from_fn(lo, hi, Some(0), Some(0), |j, _| {
        d(j).unwrap_or_else(|| {
            missing = Some(j);
            Rational::zero()
        })
    })?;
    match missing {
        Some(j) => Err(coverage("diagonal", j)),
        None => Ok(op),
    }
}

/// `M_0, Ψ, M_2, Ψ, …, M_{2n-2}, Ψ` with `M_{2i} = Φ(a_i, b_i)`.
#[derive(Clone, Debug)]
pub struct TransitionFamily {
    pub n: usize,
    pub weights: WeightField,
}

impl TransitionFamily {
    pub fn new(n: usize, weights: WeightField) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one Φ factor".into()));
        }
        Ok(TransitionFamily { n, weights })
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `M_m` on the window.
    pub fn operator(&self, m: usize, lo: i64, hi: i64) -> Result<WindowedOperator> {
        if m >= self.len() {
            return Err(Error::Domain(format!("no transition M_{m} for n = {}", self.n)));
        }
        if m.is_multiple_of(2) {
            phi_column(&self.weights, (m / 2) as i64, lo, hi)
        } else {
            psi_operator(lo, hi)
        }
    }

    pub fn operators(&self, lo: i64, hi: i64) -> Result<Vec<WindowedOperator>> {
        (0..self.len()).map(|m| self.operator(m, lo, hi)).collect()
    }
}

/// `V = M_0 Ψ M_2 Ψ ⋯ M_{2n-2} Ψ` on `[lo, hi]`.
pub fn product_v(f: &TransitionFamily, lo: i64, hi: i64) -> Result<WindowedOperator> {
    let mut v = WindowedOperator::identity(lo, hi)?;
    for op in f.operators(lo, hi)? {
        v = v.mul(&op)?;
    }
    Ok(v)
}

/// Default window `[-(n+p)-1, n]` certifying every entry of `W`.
pub fn default_window(n: usize, p: usize) -> (i64, i64) {
    (-((n + p) as i64) - 1, n as i64)
}

/// `W_{rs} = V(n-r, -s)` for `r, s = 1..n+p`.
pub fn extract_w(v: &WindowedOperator, n: usize, p: usize) -> Result<RationalMatrix> {
    let m = n + p;
    let mut out = RationalMatrix::zeros(m, m);
    for r in 1..=m {
        for s in 1..=m {
            let (j, k) = (n as i64 - r as i64, -(s as i64));
            out[(r - 1, s - 1)] = v.entry(j, k).map_err(|_| {
                let (lo, hi) = default_window(n, p);
                Error::Extent(format!("V({j}, {k}) not certified on [{}, {}]; use at least [{lo}, {hi}]", v.window().0, v.window().1))
            })?;
        }
    }
    Ok(out)
}

/// Kernel of non-intersecting paths through transitions `M_0, …, M_{L-1}`
/// from `starts` (at time 0) to `ends` (at time `L`):
/// `-1[m₁<m₂] P(m₁,m₂)(x₁,x₂) + Σ_{r,s} P(m₁,L)(x₁,e_s) W⁻¹(s,r) P(0,m₂)(s_r,x₂)`
/// with `P(a,b) = M_a ⋯ M_{b-1}` and `W_{rs} = P(0,L)(s_r, e_s)`.
#[derive(Debug)]
pub struct PathKernel {
    ops: Vec<WindowedOperator>,
    starts: Vec<i64>,
    ends: Vec<i64>,
    w: RationalMatrix,
    w_inv: RationalMatrix,
    prefix: Vec<WindowedOperator>,
    suffix: Vec<WindowedOperator>,
    between: Mutex<HashMap<(usize, usize), WindowedOperator>>,
}

impl PathKernel {
    pub fn new(ops: Vec<WindowedOperator>, starts: Vec<i64>, ends: Vec<i64>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::Domain("no transitions".into()));
        };
        if starts.len() != ends.len() {
            return Err(Error::Dimension(format!("{} starts and {} ends", starts.len(), ends.len())));
        }
        let (lo, hi) = first.window();
        let len = ops.len();
        let mut prefix = vec![WindowedOperator::identity(lo, hi)?];
        for op in &ops {
            let next = prefix.last().unwrap().mul(op)?;
            prefix.push(next);
        }
        let mut suffix = vec![WindowedOperator::identity(lo, hi)?];
        for op in ops.iter().rev() {
            let next = op.mul(suffix.last().unwrap())?;
            suffix.push(next);
        }
        suffix.reverse();
        let total = &prefix[len];
        let m = starts.len();
        let mut w = RationalMatrix::zeros(m, m);
        for r in 0..m {
            for s in 0..m {
                w[(r, s)] = total.entry(starts[r], ends[s])?;
            }
        }
        let w_inv = w.inverse()?;
        Ok(PathKernel { ops, starts, ends, w, w_inv, prefix, suffix, between: Mutex::new(HashMap::new()) })
    }

    pub fn w(&self) -> &RationalMatrix {
        &self.w
    }

    pub fn w_inverse(&self) -> &RationalMatrix {
        &self.w_inv
    }

    /// Number of time steps `L`.
    pub fn steps(&self) -> usize {
        self.ops.len()
    }

    /// `P(m₁, m₂)(x₁, x₂)` for `m₁ ≤ m₂`.
    pub fn propagator(&self, m1: usize, m2: usize, x1: i64, x2: i64) -> Result<Rational> {
        if m1 > m2 || m2 > self.ops.len() {
            return Err(Error::Domain(format!("no propagator from {m1} to {m2}")));
        }
        if m1 == 0 {
            return self.prefix[m2].entry(x1, x2);
        }
        if m2 == self.ops.len() {
            return self.suffix[m1].entry(x1, x2);
        }
        let mut cache = self.between.lock().expect("kernel cache poisoned");
        if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry((m1, m2)) {
            let (lo, hi) = self.ops[0].window();
            let mut p = WindowedOperator::identity(lo, hi)?;
            for op in &self.ops[m1..m2] {
                p = p.mul(op)?;
            }
            slot.insert(p);
        }
        cache[&(m1, m2)].entry(x1, x2)
    }

    pub fn kernel(&self, m1: usize, x1: i64, m2: usize, x2: i64) -> Result<Rational> {
        let len = self.ops.len();
        if m1 > len || m2 > len {
            return Err(Error::Domain(format!("times must lie in [0, {len}]")));
        }
        let mut total = Rational::zero();
        if m1 < m2 {
            total -= self.propagator(m1, m2, x1, x2)?;
        }
        let left: Vec<Rational> = self.ends.iter().map(|&e| self.suffix[m1].entry(x1, e)).collect::<Result<_>>()?;
        let right: Vec<Rational> = self.starts.iter().map(|&s| self.prefix[m2].entry(s, x2)).collect::<Result<_>>()?;
        for (s, l) in left.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            for (r, rr) in right.iter().enumerate() {
                if !rr.is_zero() {
                    total += l * self.w_inv.get(s, r) * rr;
                }
            }
        }
        Ok(total)
    }

    /// `det [K(pᵢ, pⱼ)]` over space-time points `(m, x)`.
    pub fn correlation(&self, points: &[(usize, i64)]) -> Result<Rational> {
        if points.is_empty() {
            return Ok(Rational::one());
        }
        let mut k = RationalMatrix::zeros(points.len(), points.len());
        for (i, &(m1, x1)) in points.iter().enumerate() {
            for (j, &(m2, x2)) in points.iter().enumerate() {
                k[(i, j)] = self.kernel(m1, x1, m2, x2)?;
            }
        }
        k.det()
    }
}

/// Eynard-Mehta kernel for the tower of size `n` and corridor `p`, with
/// paths from `n - r` to `-s`, `r, s = 1..n+p`.
pub fn finite_kernel(f: &TransitionFamily, p: usize, window: Option<(i64, i64)>) -> Result<PathKernel> {
    let (n, m) = (f.n as i64, (f.n + p) as i64);
    let (lo, hi) = window.unwrap_or_else(|| default_window(f.n, p));
    PathKernel::new(f.operators(lo, hi)?, (1..=m).map(|r| n - r).collect(), (1..=m).map(|s| -s).collect())
}

/// Single query of the finite kernel.
pub fn em_kernel_finite(f: &TransitionFamily, p: usize, query: (usize, i64, usize, i64)) -> Result<Rational> {
    let (m1, x1, m2, x2) = query;
    finite_kernel(f, p, None)?.kernel(m1, x1, m2, x2)
}

/// The graph `𝒢` on columns `0..=2n` and heights `[lo, hi]`: from `(2i, j)`
/// to `(2i+1, j)` with weight `a_{i,j}` and to `(2i+1, j-1)` with `b_{i,j}`,
/// from `(2i+1, j)` to `(2i+2, j)` and from `(2i+2, j)` down to
/// `(2i+2, j-1)` with weight 1.
pub fn g_graph(f: &TransitionFamily, lo: i64, hi: i64) -> Result<DrGraph> {
    let mut g = DrGraph::default();
    for i in 0..f.n as i64 {
        for j in lo..=hi {
            let a = f.weights.get_a(i, j).ok_or_else(|| coverage("a", j))?;
            let b = f.weights.get_b(i, j).ok_or_else(|| coverage("b", j))?;
            g.edges.push(((2 * i, j), (2 * i + 1, j), a.clone()));
            if j > lo {
                g.edges.push(((2 * i, j), (2 * i + 1, j - 1), b.clone()));
            }
            g.edges.push(((2 * i + 1, j), (2 * i + 2, j), Rational::one()));
            if j > lo {
                g.edges.push(((2 * i + 2, j), (2 * i + 2, j - 1), Rational::one()));
            }
        }
    }
    for (u, v, _) in &g.edges {
        g.vertices.insert(*u);
        g.vertices.insert(*v);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::int;

    #[test]
    fn psi_times_inverse() {
        let p = psi_operator(-3, 3).unwrap();
        let q = psi_inverse_operator(-3, 3).unwrap();
        let id = p.mul(&q).unwrap();
        for j in -3..=3 {
            for k in -3..=3 {
                assert_eq!(id.entry(j, k).unwrap(), if j == k { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn psi_square_is_uncertified_near_the_bottom() {
        let p = psi_operator(-3, 3).unwrap();
        let pp = p.mul(&p).unwrap();
        assert_eq!(pp.entry(3, -3).unwrap(), int(7));
        assert!(pp.is_exact(3, -3));
        let pq = p.mul(&shift_operator(-1, -3, 3).unwrap()).unwrap();
        assert!(!pq.is_exact(3, -3));
        assert!(pq.is_exact(0, 3));
    }

    #[test]
    fn structure_tags() {
        assert_eq!(psi_operator(0, 2).unwrap().structure(), Structure::Lower);
        let phi = phi_operator(|_| Some(int(1)), |_| Some(int(1)), -2, 2).unwrap();
        assert_eq!(phi.structure(), Structure::Banded { lower: 1, upper: 0 });
        assert!(phi.verify_structure());
    }
}
