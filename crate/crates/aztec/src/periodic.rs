//! Block Toeplitz symbols for vertically periodic weights.
//!
//! A `p×p` symbol `A(z)` stands for the operator with
//! `M(A)(pj+r, pk+s) = [z^{k-j}] A(z)_{r,s}`, `0 ≤ r, s < p`. Entries are
//! recovered by the trapezoid rule on a circle of radius `1+ε`.

use crate::error::{Error, Result};
use crate::factorization::{invert_lu, invert_ul, lu_decompose, ul_decompose};
use crate::numerics::{to_f64, Rational};
use crate::transitions::{TransitionFamily, WindowedOperator};
use crate::weights::{check_assumption, Extent};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

/// A matrix-valued function of `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// `(1 - 1/z)^{-psi_power} Σ_k coeffs[k] z^k`.
    Laurent {
        p: usize,
        coeffs: BTreeMap<i64, CMatrix>,
        psi_power: u32,
    },
    Product(Vec<Symbol>),
    Inverse(Box<Symbol>),
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Symbol {
    pub fn identity(p: usize) -> Symbol {
        Symbol::Laurent { p, coeffs: BTreeMap::from([(0, CMatrix::identity(p, p))]), psi_power: 0 }
    }

    pub fn p(&self) -> usize {
        match self {
            Symbol::Laurent { p, .. } => *p,
            Symbol::Product(items) => items.first().map_or(0, Symbol::p),
            Symbol::Inverse(s) => s.p(),
        }
    }

    pub fn product(items: Vec<Symbol>) -> Result<Symbol> {
        let Some(p) = items.first().map(Symbol::p) else {
            return Err(Error::Dimension("empty symbol product".into()));
        };
        if items.iter().any(|s| s.p() != p) {
            return Err(Error::Dimension("symbol block sizes differ".into()));
        }
        Ok(Symbol::Product(items))
    }

    pub fn inverse(self) -> Symbol {
        match self {
            Symbol::Inverse(s) => *s,
            s => Symbol::Inverse(Box::new(s)),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<CMatrix> {
        match self {
            Symbol::Laurent { p, coeffs, psi_power } => {
                let mut m = CMatrix::zeros(*p, *p);
                for (&k, ck) in coeffs {
                    m += ck * z.powi(k as i32);
                }
                if *psi_power > 0 {
                    let d = Complex64::new(1.0, 0.0) - z.inv();
                    m /= d.powi(*psi_power as i32);
                }
                Ok(m)
            }
            Symbol::Product(items) => {
                let mut m = CMatrix::identity(self.p(), self.p());
                for s in items {
                    m *= s.eval(z)?;
                }
                Ok(m)
            }
            Symbol::Inverse(s) => {
                let m = s.eval(z)?;
                let det = m.determinant();
                m.try_inverse().ok_or_else(|| Error::Singular { det: format!("{det} at z = {z}") })
            }
        }
    }

    pub fn det(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.determinant())
    }

    /// Laurent coefficients as `[re, im]` pairs; products and inverses nest.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Symbol::Laurent { p, coeffs, psi_power } => {
                let cs: serde_json::Map<String, serde_json::Value> = coeffs.iter().map(|(k, m)| (k.to_string(), cmatrix_json(m))).collect();
                serde_json::json!({ "p": p, "psi_power": psi_power, "coefficients": cs })
            }
            Symbol::Product(items) => serde_json::json!({ "product": items.iter().map(Symbol::to_json).collect::<Vec<_>>() }),
            Symbol::Inverse(s) => serde_json::json!({ "inverse": s.to_json() }),
        }
    }
}

pub fn cmatrix_json(m: &CMatrix) -> serde_json::Value {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|s| serde_json::json!([m[(r, s)].re, m[(r, s)].im])).collect::<Vec<_>>()).collect()
}

fn laurent(p: usize, terms: Vec<(i64, CMatrix)>, psi_power: u32) -> Symbol {
    let mut coeffs: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for (k, m) in terms {
        *coeffs.entry(k).or_insert_with(|| CMatrix::zeros(p, p)) += m;
    }
    Symbol::Laurent { p, coeffs, psi_power }
}

/// `φ(z; a, b)`: `a_r` on the diagonal, `b_r` at `(r, r-1)` and `b_0/z` in
/// the corner.
pub fn symbol_phi(a: &[Rational], b: &[Rational]) -> Result<Symbol> {
    let p = a.len();
    if p == 0 || b.len() != p {
        return Err(Error::Dimension(format!("periods {} and {} must agree and be positive", a.len(), b.len())));
    }
    let mut c0 = CMatrix::zeros(p, p);
    let mut c1 = CMatrix::zeros(p, p);
    for r in 0..p {
        c0[(r, r)] += c(to_f64(&a[r]));
        if r > 0 {
            c0[(r, r - 1)] += c(to_f64(&b[r]));
        }
    }
    c1[(0, p - 1)] = c(to_f64(&b[0]));
    Ok(laurent(p, vec![(0, c0), (-1, c1)], 0))
}

/// `ψ(z) = (1 - 1/z)^{-1}(T + U/z)`, `T` the ones on and below the diagonal
/// and `U` the ones above it.
pub fn symbol_psi(p: usize) -> Symbol {
    let t = CMatrix::from_fn(p, p, |r, s| if s <= r { c(1.0) } else { c(0.0) });
    let u = CMatrix::from_fn(p, p, |r, s| if s > r { c(1.0) } else { c(0.0) });
    laurent(p, vec![(0, t), (-1, u)], 1)
}

/// `s(z)^m`, the symbol of `S^m`.
pub fn symbol_shift(p: usize, m: i64) -> Symbol {
    let mut terms = Vec::new();
    for r in 0..p as i64 {
        // S^m(x, x-m) = 1 with x = r in block 0
        let y = r - m;
        let (k, s) = (y.div_euclid(p as i64), y.rem_euclid(p as i64));
        let mut e = CMatrix::zeros(p, p);
        e[(r as usize, s as usize)] = c(1.0);
        terms.push((k, e));
    }
    laurent(p, terms, 0)
}

/// Root `∏b/∏a` of `det(s^i φ s^{-i-1}) = z∏a - ∏b`.
pub fn phi_det_root(a: &[Rational], b: &[Rational]) -> f64 {
    let pa: Rational = a.iter().product();
    let pb: Rational = b.iter().product();
    to_f64(&(pb / pa))
}

/// Entries of `M(sym)` on block rows `j_range` and block columns `k_range`.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub entries: CMatrix,
    /// Largest change under the last node doubling.
    pub accuracy: f64,
    pub nodes: usize,
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 4 || !nodes.is_power_of_two() {
        return Err(Error::Domain(format!("node count {nodes} must be a power of two, at least 4")));
    }
    Ok(())
}

fn circle(radius: f64, nodes: usize) -> Vec<Complex64> {
    (0..nodes).map(|m| Complex64::from_polar(radius, 2.0 * PI * m as f64 / nodes as f64)).collect()
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Runs `f` at `nodes`, `2·nodes`, `4·nodes` and fails when the doubling
/// error stops shrinking above the rounding floor.
fn doubled(nodes: usize, mut f: impl FnMut(usize) -> Result<CMatrix>) -> Result<(CMatrix, f64, usize)> {
    check_nodes(nodes)?;
    let q1 = f(nodes)?;
    let q2 = f(2 * nodes)?;
    let q4 = f(4 * nodes)?;
    let (e1, e2) = (max_diff(&q1, &q2), max_diff(&q2, &q4));
    let scale = q4.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let floor = 1e-12 * scale;
    if !e2.is_finite() || (e2 > floor && e2 >= e1) {
        return Err(Error::Quadrature(format!("node doubling errors {e1:e} then {e2:e} do not decrease")));
    }
    Ok((q4, e2, 4 * nodes))
}

pub fn toeplitz_entries(
    sym: &Symbol,
    j_range: std::ops::RangeInclusive<i64>,
    k_range: std::ops::RangeInclusive<i64>,
    epsilon: f64,
    nodes: usize,
) -> Result<Quadrature> {
    if epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let p = sym.p();
    let (j0, k0) = (*j_range.start(), *k_range.start());
    let (nj, nk) = ((j_range.end() - j0 + 1).max(0) as usize, (k_range.end() - k0 + 1).max(0) as usize);
    let (d_lo, d_hi) = (k0 - j_range.end(), k_range.end() - j0);
    let (entries, accuracy, nodes) = doubled(nodes, |n| {
        let zs = circle(1.0 + epsilon, n);
        let values: Vec<CMatrix> = zs.iter().map(|&z| sym.eval(z)).collect::<Result<_>>()?;
        let mut coeff = BTreeMap::new();
        for d in d_lo..=d_hi {
            let mut acc = CMatrix::zeros(p, p);
            for (z, v) in zs.iter().zip(&values) {
                acc += v * z.powi(-d as i32);
            }
            coeff.insert(d, acc / c(n as f64));
        }
        let mut out = CMatrix::zeros(p * nj, p * nk);
        for bj in 0..nj {
            for bk in 0..nk {
                let d = (k0 + bk as i64) - (j0 + bj as i64);
                out.view_mut((p * bj, p * bk), (p, p)).copy_from(&coeff[&d]);
            }
        }
        Ok(out)
    })?;
    Ok(Quadrature { entries, accuracy, nodes })
}

/// Exact Laurent coefficients of a block Toeplitz operator read at
/// `origin + p·j + r`. Every certified entry of the window is compared with
/// the coefficients, so a non-Toeplitz operator is reported.
pub fn laurent_from_operator(op: &WindowedOperator, p: usize, origin: i64, d_range: (i64, i64)) -> Result<Symbol> {
    let pi = p as i64;
    let (lo, hi) = op.window();
    let (d_lo, d_hi) = d_range;
    let mut exact: BTreeMap<(i64, usize, usize), Rational> = BTreeMap::new();
    for d in d_lo..=d_hi {
        for r in 0..pi {
            for s in 0..pi {
                let v = op.entry(origin + r, origin + pi * d + s)?;
                exact.insert((d, r as usize, s as usize), v);
            }
        }
    }
    for x in lo..=hi {
        for y in lo..=hi {
            if !op.is_exact(x, y) {
                continue;
            }
            let (xr, yr) = (x - origin, y - origin);
            let d = yr.div_euclid(pi) - xr.div_euclid(pi);
            let key = (d, xr.rem_euclid(pi) as usize, yr.rem_euclid(pi) as usize);
            let expected = exact.get(&key).cloned().unwrap_or_else(Rational::zero);
            if op.entry(x, y)? != expected {
                return Err(Error::Structural(format!(
                    "factor is not block Toeplitz with period {p}: entry ({x}, {y}) breaks the pattern"
                )));
            }
        }
    }
    let mut terms = Vec::new();
    for d in d_lo..=d_hi {
        let m = CMatrix::from_fn(p, p, |r, s| c(to_f64(&exact[&(d, r, s)])));
        if m.iter().any(|x| !x.is_zero()) {
            terms.push((d, m));
        }
    }
    Ok(laurent(p, terms, 0))
}

fn vertical_period(f: &TransitionFamily) -> Result<usize> {
    match f.weights.extent() {
        Extent::Periodic { p, .. } => Ok(p),
        Extent::Window { .. } => Err(Error::Domain("block Toeplitz symbols need vertically periodic weights".into())),
    }
}

fn column(f: &TransitionFamily, i: i64, p: usize) -> (Vec<Rational>, Vec<Rational>) {
    (0..p as i64).map(|r| (f.weights.a(i, r).clone(), f.weights.b(i, r).clone())).unzip()
}

/// Symbols of the family read relative to height `n`, followed by
/// `s^{-n}`: `s^{-n}A_k s^n` for `k = 0..2n-1`, then `s^{-n}`. Their product
/// is the symbol of `S^{-n}GS^n`.
pub fn transition_symbols(f: &TransitionFamily) -> Result<Vec<Symbol>> {
    let p = vertical_period(f)?;
    let n = f.n as i64;
    let mut out = Vec::with_capacity(2 * f.n + 1);
    for i in 0..n {
        let (a, b) = column(f, i, p);
        let phi = Symbol::product(vec![symbol_shift(p, -n), symbol_phi(&a, &b)?, symbol_shift(p, n)])?;
        out.push(phi);
        out.push(symbol_psi(p));
    }
    out.push(symbol_shift(p, -n));
    Ok(out)
}

/// Half the distance from 1 to the nearest root `∏b/∏a` of the Φ factors.
pub fn default_epsilon(f: &TransitionFamily) -> Result<f64> {
    let p = vertical_period(f)?;
    let mut root = f64::INFINITY;
    for i in 0..f.n as i64 {
        let (a, b) = column(f, i, p);
        root = root.min(phi_det_root(&a, &b));
    }
    if root <= 1.0 {
        return Err(Error::Assumption(format!("a Φ factor has its root at {root} ≤ 1")));
    }
    Ok((root - 1.0) / 2.0)
}

/// `φ = plus·minus = tilde_minus·tilde_plus`; plus factors are analytic
/// inside the unit circle and minus factors outside it, with
/// `minus(∞) = tilde_minus(∞) = I`.
#[derive(Clone, Debug)]
pub struct WienerHopfPair {
    pub p: usize,
    pub plus: Symbol,
    pub minus_inverse: Symbol,
    pub tilde_plus: Symbol,
    pub tilde_minus_inverse: Symbol,
    pub epsilon: f64,
    /// Largest deviation of either product from `φ` at the sample points.
    pub deviation: f64,
}

impl WienerHopfPair {
    pub fn minus(&self) -> Symbol {
        self.minus_inverse.clone().inverse()
    }

    pub fn tilde_minus(&self) -> Symbol {
        self.tilde_minus_inverse.clone().inverse()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "epsilon": self.epsilon,
            "deviation": self.deviation,
            "plus": self.plus.to_json(),
            "minus_inverse": self.minus_inverse.to_json(),
            "tilde_plus": self.tilde_plus.to_json(),
            "tilde_minus_inverse": self.tilde_minus_inverse.to_json(),
        })
    }
}

fn scale_coeffs(sym: &Symbol, left: Option<&CMatrix>, right: Option<&CMatrix>) -> Symbol {
    match sym {
        Symbol::Laurent { p, coeffs, psi_power } => Symbol::Laurent {
            p: *p,
            coeffs: coeffs
                .iter()
                .map(|(&k, m)| {
                    let mut m = m.clone();
                    if let Some(l) = left {
                        m = l * m;
                    }
                    if let Some(r) = right {
                        m *= r;
                    }
                    (k, m)
                })
                .collect(),
            psi_power: *psi_power,
        },
        other => other.clone(),
    }
}

fn coeff_at_infinity(sym: &Symbol) -> CMatrix {
    match sym {
        Symbol::Laurent { p, coeffs, .. } => coeffs.get(&0).cloned().unwrap_or_else(|| CMatrix::zeros(*p, *p)),
        _ => unreachable!("read-off symbols are Laurent"),
    }
}

/// Winding number of `f` along the circle of radius `r`.
pub fn winding_number(f: impl Fn(Complex64) -> Result<Complex64>, radius: f64, nodes: usize) -> Result<i64> {
    let zs = circle(radius, nodes);
    let mut total = 0.0;
    let mut prev = f(zs[0])?;
    for k in 1..=nodes {
        let cur = f(zs[k % nodes])?;
        if cur.norm() == 0.0 {
            return Err(Error::Consistency(format!("zero on the circle of radius {radius}")));
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Factorizations read off the LU and UL refactorizations of one vertical
/// period, relative to height `n`.
pub fn wiener_hopf_from_dynamics(f: &TransitionFamily) -> Result<WienerHopfPair> {
    let p = vertical_period(f)?;
    check_assumption(&f.weights, 0..f.n as i64).report()?;
    let epsilon = default_epsilon(f)?;
    let (n, pi) = (f.n as i64, p as i64);
    let reach = n / pi + 2;
    let (lo, hi) = (n - pi * (reach + 4) - 3 * n - 6, n + pi * (reach + 4) + 2);
    let lu = lu_decompose(f, lo, hi)?;
    let ul = ul_decompose(f, lo, hi)?;
    let one = invert_lu(&lu)?;
    let two = invert_ul(&ul)?;
    let upper = (-1, reach);
    let lower = (-reach, 1);
    let tilde_plus = laurent_from_operator(&lu.u, p, n, upper)?;
    let tilde_minus_inverse = laurent_from_operator(&one.lambda, p, n, lower)?;
    let plus = laurent_from_operator(&ul.u, p, n, upper)?;
    let minus_inverse = laurent_from_operator(&two.lambda, p, n, lower)?;
    // normalize the minus factors to I at infinity
    let c1 = coeff_at_infinity(&tilde_minus_inverse);
    let c1_inv = c1.clone().try_inverse().ok_or_else(|| Error::Singular { det: "0".into() })?;
    let tilde_minus_inverse = scale_coeffs(&tilde_minus_inverse, Some(&c1_inv), None);
    let tilde_plus = scale_coeffs(&tilde_plus, Some(&c1_inv), None);
    let c2 = coeff_at_infinity(&minus_inverse);
    let c2_inv = c2.clone().try_inverse().ok_or_else(|| Error::Singular { det: "0".into() })?;
    let minus_inverse = scale_coeffs(&minus_inverse, None, Some(&c2_inv));
    let plus = scale_coeffs(&plus, None, Some(&c2_inv));

    let phi = Symbol::product(transition_symbols(f)?)?;
    let mut pair = WienerHopfPair { p, plus, minus_inverse, tilde_plus, tilde_minus_inverse, epsilon, deviation: 0.0 };
    let mut deviation: f64 = 0.0;
    for z in circle(1.0 + epsilon / 2.0, 64) {
        let target = phi.eval(z)?;
        let ul_side = pair.plus.eval(z)? * pair.minus().eval(z)?;
        let lu_side = pair.tilde_minus().eval(z)? * pair.tilde_plus.eval(z)?;
        let scale = target.iter().map(|x| x.norm()).fold(1.0, f64::max);
        deviation = deviation.max(max_diff(&ul_side, &target) / scale).max(max_diff(&lu_side, &target) / scale);
    }
    pair.deviation = deviation;
    if deviation > 1e-8 {
        return Err(Error::Consistency(format!("factor products deviate from the symbol by {deviation:e}")));
    }
    // plus factors: no zeros of det inside the unit circle
    for s in [&pair.plus, &pair.tilde_plus] {
        if winding_number(|z| s.det(z), 1.0, 512)? != 0 {
            return Err(Error::Consistency("det of a plus factor vanishes inside the unit circle".into()));
        }
    }
    // inverse minus factors: no zeros of det outside radius 1+ε/2
    for s in [&pair.minus_inverse, &pair.tilde_minus_inverse] {
        if winding_number(|z| s.det(z), 1.0 + epsilon / 2.0, 512)? != 0 {
            return Err(Error::Consistency("det of a minus factor vanishes outside the unit circle".into()));
        }
    }
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Top,
    Bottom,
}

#[derive(Clone, Debug)]
pub struct KernelBlock {
    pub matrix: CMatrix,
    pub accuracy: f64,
    pub nodes: usize,
}

impl KernelBlock {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "matrix": cmatrix_json(&self.matrix), "accuracy": self.accuracy, "nodes": self.nodes })
    }
}

fn ordered_product(symbols: &[Symbol], range: std::ops::Range<usize>, p: usize) -> Result<Symbol> {
    let items: Vec<Symbol> = symbols[range].to_vec();
    if items.is_empty() {
        Ok(Symbol::identity(p))
    } else {
        Symbol::product(items)
    }
}

/// `p×p` block of the limiting kernel at times `m₁, m₂` and block heights
/// `y₁, y₂`, measured from the top (`Top`, block `-1` is the highest
/// start) or from the bottom (`Bottom`, block `0` is the lowest start).
///
/// `symbols` multiply to the symbol factored by `pair`; `m₁, m₂` index
/// positions in that list.
#[allow(clippy::too_many_arguments)]
pub fn contour_kernel(
    symbols: &[Symbol],
    pair: &WienerHopfPair,
    (m1, y1): (usize, i64),
    (m2, y2): (usize, i64),
    mode: Mode,
    epsilon: f64,
    nodes: usize,
) -> Result<KernelBlock> {
    let len = symbols.len();
    if m1 >= len || m2 >= len {
        return Err(Error::Domain(format!("times must lie in [0, {}]", len.saturating_sub(1))));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let p = pair.p;
    let tail = ordered_product(symbols, m1..len, p)?;
    let head = ordered_product(symbols, 0..m2, p)?;
    let (left, right, rw, rz, sign) = match mode {
        Mode::Top => (
            Symbol::product(vec![tail, pair.tilde_plus.clone().inverse()])?,
            Symbol::product(vec![pair.tilde_minus_inverse.clone(), head])?,
            1.0 + epsilon / 2.0,
            1.0 + epsilon,
            1.0,
        ),
        Mode::Bottom => (
            Symbol::product(vec![tail, pair.minus_inverse.clone()])?,
            Symbol::product(vec![pair.plus.clone().inverse(), head])?,
            1.0 + epsilon,
            1.0 + epsilon / 2.0,
            -1.0,
        ),
    };
    let between = if m1 < m2 { Some(ordered_product(symbols, m1..m2, p)?) } else { None };
    let (matrix, accuracy, nodes) = doubled(nodes, |n| {
        let ws = circle(rw, n);
        let zs = circle(rz, n);
        let lw: Vec<CMatrix> = ws.iter().map(|&w| Ok(left.eval(w)? * w.powi(y1 as i32 + 1))).collect::<Result<_>>()?;
        let rz_vals: Vec<CMatrix> = zs.iter().map(|&z| Ok(right.eval(z)? * z.powi(-(y2 as i32)))).collect::<Result<_>>()?;
        let mut acc = CMatrix::zeros(p, p);
        for (w, lv) in ws.iter().zip(&lw) {
            let mut inner = CMatrix::zeros(p, p);
            for (z, rv) in zs.iter().zip(&rz_vals) {
                inner += rv / (z - w);
            }
            acc += lv * inner;
        }
        let mut out = acc * c(sign / (n as f64 * n as f64));
        if let Some(b) = &between {
            let zs = circle(1.0 + epsilon, n);
            let mut ind = CMatrix::zeros(p, p);
            for &z in &zs {
                ind += b.eval(z)? * z.powi(-((y2 - y1) as i32));
            }
            out -= ind / c(n as f64);
        }
        Ok(out)
    })?;
    Ok(KernelBlock { matrix, accuracy, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::int;

    #[test]
    fn scalar_phi() {
        let s = symbol_phi(&[int(2)], &[int(3)]).unwrap();
        let z = Complex64::new(0.5, 1.0);
        assert!((s.eval(z).unwrap()[(0, 0)] - (c(2.0) + c(3.0) / z)).norm() < 1e-14);
    }

    #[test]
    fn shift_inverse() {
        let z = Complex64::new(1.3, -0.4);
        let a = symbol_shift(3, 2).eval(z).unwrap();
        let b = symbol_shift(3, -2).eval(z).unwrap();
        assert!(max_diff(&(a * b), &CMatrix::identity(3, 3)) < 1e-14);
    }

    #[test]
    fn powers_of_two() {
        assert!(check_nodes(64).is_ok());
        assert!(check_nodes(48).is_err());
    }
}
