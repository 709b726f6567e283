//! LU and UL decompositions of `G = V S^{-n}` by refactorization, the
//! inverses of their factors, an approximate inverse of the finite block
//! `G₂₂` and the limiting kernel as the corridor grows.

use crate::error::{Error, Result};
use crate::numerics::{rational_to_string, to_f64, Rational, RationalMatrix};
use crate::transitions::{diag_operator, phi_operator, product_v, psi_inverse_operator, psi_operator, TransitionFamily, WindowedOperator};
use crate::weights::{check_assumption, AssumptionReport, WeightField};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

/// Stage parameters `a`, `b` keyed by `(column, row)`.
pub type Params = BTreeMap<(i64, i64), (Rational, Rational)>;

/// Triangular factorization `G = L U` (LU) or `G = U L` (UL).
#[derive(Clone, Debug)]
pub struct Factorization {
    pub n: usize,
    pub l: WindowedOperator,
    pub u: WindowedOperator,
    /// Parameters after each stage; entry 0 holds the input.
    pub stages: Vec<Params>,
    /// `X_0^{(j)}` for LU, `Y_{n-1}^{[j]}` for UL, as diagonal rows.
    pub diagonals: Vec<BTreeMap<i64, Rational>>,
}

pub type LUFactorization = Factorization;

fn initial_params(w: &WeightField, n: usize, k_lo: i64, k_hi: i64) -> Result<Params> {
    let mut out = Params::new();
    for i in 0..n as i64 {
        for k in k_lo..=k_hi {
            let (Some(a), Some(b)) = (w.get_a(i, k), w.get_b(i, k)) else {
                return Err(Error::Extent(format!("weights needed at ({i}, {k})")));
            };
            out.insert((i, k), (a.clone(), b.clone()));
        }
    }
    Ok(out)
}

fn param(p: &Params, i: i64, k: i64) -> Result<&(Rational, Rational)> {
    p.get(&(i, k)).ok_or_else(|| Error::Extent(format!("stage parameter ({i}, {k}) out of range")))
}

fn sum(p: &Params, i: i64, k: i64) -> Result<Rational> {
    let (a, b) = param(p, i, k)?;
    Ok(a + b)
}

fn phi_from(p: &Params, i: i64, lo: i64, hi: i64) -> Result<WindowedOperator> {
    phi_operator(|k| p.get(&(i, k)).map(|x| x.0.clone()), |k| p.get(&(i, k)).map(|x| x.1.clone()), lo, hi)
}

fn diag_from(d: &BTreeMap<i64, Rational>, lo: i64, hi: i64) -> Result<WindowedOperator> {
    diag_operator(|k| d.get(&k).cloned(), lo, hi)
}

/// Parameter rows needed by [`lu_decompose`] on `[lo, hi]`.
pub fn lu_param_range(n: usize, lo: i64, hi: i64) -> (i64, i64) {
    (lo - n as i64 - 1, hi)
}

/// Parameter rows needed by [`ul_decompose`] on `[lo, hi]`.
pub fn ul_param_range(n: usize, lo: i64, hi: i64) -> (i64, i64) {
    (lo, hi + n as i64 + 1)
}

/// `L¹ = X₀⁽⁰⁾Ψ ⋯ X₀⁽ⁿ⁻¹⁾Ψ` and `U¹ = M₀⁽ⁿ⁾ M₂⁽ⁿ⁻¹⁾ ⋯ M_{2n-2}⁽¹⁾ S^{-n}`.
///
/// Stage `j` applies the hat maps to columns `i < n-j` and the boundary
/// maps `â = a/(a+b)`, `b̂_k = b_{k-1}/(a_{k-1}+b_{k-1})` to column `n-j`.
pub fn lu_decompose(f: &TransitionFamily, lo: i64, hi: i64) -> Result<Factorization> {
    let n = f.n as i64;
    let (k_lo, k_hi) = lu_param_range(f.n, lo, hi);
    let mut stages = vec![initial_params(&f.weights, f.n, k_lo, k_hi)?];
    let mut diagonals = Vec::new();
    for j in 1..=n {
        let prev = stages.last().unwrap();
        let mut d = BTreeMap::new();
        for k in k_lo + j - 1..=k_hi {
            d.insert(k, sum(prev, 0, k)?);
        }
        diagonals.push(d);
        let mut next = Params::new();
        for i in 0..=n - j {
            for k in k_lo + j..=k_hi {
                let (a, _) = param(prev, i, k)?;
                let (_, b1) = param(prev, i, k - 1)?;
                let value = if i < n - j {
                    (a * sum(prev, i + 1, k)? / sum(prev, i, k)?, b1 * sum(prev, i + 1, k - 1)? / sum(prev, i, k - 1)?)
                } else {
                    (a / sum(prev, i, k)?, b1 / sum(prev, i, k - 1)?)
                };
                next.insert((i, k), value);
            }
        }
        // frozen columns keep their last values
        for (&(i, k), v) in prev {
            if i > n - j && k >= k_lo + j {
                next.insert((i, k), v.clone());
            }
        }
        stages.push(next);
    }
    let mut l = WindowedOperator::identity(lo, hi)?;
    for d in &diagonals {
        l = l.mul(&diag_from(d, lo, hi)?)?.mul(&psi_operator(lo, hi)?)?;
    }
    let mut u = WindowedOperator::identity(lo, hi)?;
    for i in 0..n {
        // column i was fixed at stage n - i
        u = u.mul(&phi_from(&stages[(n - i) as usize], i, lo, hi)?)?;
    }
    Ok(Factorization { n: f.n, l, u: u.shift_columns(n), stages, diagonals })
}

/// `U² = M₀^{[0]} M₂^{[1]} ⋯ M_{2n-2}^{[n-1]} S^{-n}` and
/// `L² = Sⁿ(Ψ Y^{[n-2]} Ψ ⋯ Y^{[0]} Ψ)S^{-n}` with
/// `Y^{[j]} = D(a^{[j]}_{n-1,k} + b^{[j]}_{n-1,k+1})`.
///
/// Stage `j` applies the boundary map `ǎ = a/(a_{j,k}+b_{j,k+1})`,
/// `b̌ = b_{j,k+1}/(a_{j,k}+b_{j,k+1})` to column `j` and the check maps to
/// columns `j+1..n-1`.
pub fn ul_decompose(f: &TransitionFamily, lo: i64, hi: i64) -> Result<Factorization> {
    let n = f.n as i64;
    let (k_lo, k_hi) = ul_param_range(f.n, lo, hi);
    let mut stages = vec![initial_params(&f.weights, f.n, k_lo, k_hi)?];
    let mut diagonals = Vec::new();
    for j in 1..n {
        let prev = stages.last().unwrap();
        let top = k_hi - j;
        let mut d = BTreeMap::new();
        for k in k_lo..=top {
            let (a, _) = param(prev, n - 1, k)?;
            let (_, b1) = param(prev, n - 1, k + 1)?;
            d.insert(k, a + b1);
        }
        diagonals.push(d);
        let mut next = Params::new();
        for i in 0..n {
            for k in k_lo..=top {
                let (a, _) = param(prev, i, k)?;
                let (_, b1) = param(prev, i, k + 1)?;
                let value = if i < j {
                    param(prev, i, k)?.clone()
                } else {
                    let own = a + b1;
                    let ratio = if i == j {
                        own.recip()
                    } else {
                        let (al, _) = param(prev, i - 1, k)?;
                        let (_, bl) = param(prev, i - 1, k + 1)?;
                        (al + bl) / own
                    };
                    (a * &ratio, b1 * &ratio)
                };
                next.insert((i, k), value);
            }
        }
        stages.push(next);
    }
    let mut u = WindowedOperator::identity(lo, hi)?;
    for i in 0..n {
        u = u.mul(&phi_from(&stages[i as usize], i, lo, hi)?)?;
    }
    let mut inner = psi_operator(lo, hi)?;
    for d in diagonals.iter().rev() {
        inner = inner.mul(&diag_from(d, lo, hi)?)?.mul(&psi_operator(lo, hi)?)?;
    }
    let l = inner.shift_columns(n).shift_rows(n);
    Ok(Factorization { n: f.n, l, u: u.shift_columns(n), stages, diagonals })
}

impl Factorization {
    /// `L·U` for LU or `U·L` for UL.
    pub fn product(&self, lu: bool) -> Result<WindowedOperator> {
        if lu {
            self.l.mul(&self.u)
        } else {
            self.u.mul(&self.l)
        }
    }

    /// Stage parameters and diagonal factors as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        let params = |p: &Params| -> serde_json::Value {
            p.iter()
                .map(|(&(i, k), (a, b))| serde_json::json!({ "i": i, "k": k, "a": rational_to_string(a), "b": rational_to_string(b) }))
                .collect()
        };
        let diag = |d: &BTreeMap<i64, Rational>| -> serde_json::Value {
            d.iter().map(|(k, v)| serde_json::json!({ "k": k, "value": rational_to_string(v) })).collect()
        };
        serde_json::json!({
            "n": self.n,
            "stages": self.stages.iter().map(params).collect::<Vec<_>>(),
            "diagonals": self.diagonals.iter().map(diag).collect::<Vec<_>>(),
        })
    }
}

/// `G = V S^{-n}` on `[lo, hi]`.
pub fn g_operator(f: &TransitionFamily, lo: i64, hi: i64) -> Result<WindowedOperator> {
    Ok(product_v(f, lo, hi)?.shift_columns(f.n as i64))
}

/// `(Λ, Υ) = (L⁻¹, U⁻¹)`.
pub struct FactorInverses {
    pub lambda: WindowedOperator,
    pub upsilon: WindowedOperator,
}

/// `Λ¹ = Ψ⁻¹(X₀⁽ⁿ⁻¹⁾)⁻¹ ⋯ Ψ⁻¹(X₀⁽⁰⁾)⁻¹` and `Υ¹ = (U¹)⁻¹`, the upper
/// triangular inverse.
pub fn invert_lu(lu: &Factorization) -> Result<FactorInverses> {
    let (lo, hi) = lu.l.window();
    let mut lambda = WindowedOperator::identity(lo, hi)?;
    for d in lu.diagonals.iter().rev() {
        let inv = inverse_diag(d)?;
        lambda = lambda.mul(&psi_inverse_operator(lo, hi)?)?.mul(&diag_from(&inv, lo, hi)?)?;
    }
    Ok(FactorInverses { lambda, upsilon: lu.u.upper_inverse()? })
}

/// `Λ² = Sⁿ Ψ⁻¹ (Y^{[0]})⁻¹ Ψ⁻¹ ⋯ (Y^{[n-2]})⁻¹ Ψ⁻¹ S^{-n}` and
/// `Υ² = (U²)⁻¹`.
pub fn invert_ul(ul: &Factorization) -> Result<FactorInverses> {
    let (lo, hi) = ul.l.window();
    let n = ul.n as i64;
    let mut inner = psi_inverse_operator(lo, hi)?;
    for d in &ul.diagonals {
        let inv = inverse_diag(d)?;
        inner = inner.mul(&diag_from(&inv, lo, hi)?)?.mul(&psi_inverse_operator(lo, hi)?)?;
    }
    let lambda = inner.shift_columns(n).shift_rows(n);
    Ok(FactorInverses { lambda, upsilon: ul.u.upper_inverse()? })
}

/// Inverses of the LU factors; kept under the module's operation name.
pub fn invert_factors(lu: &Factorization) -> Result<(WindowedOperator, WindowedOperator)> {
    let inv = invert_lu(lu)?;
    Ok((inv.lambda, inv.upsilon))
}

fn inverse_diag(d: &BTreeMap<i64, Rational>) -> Result<BTreeMap<i64, Rational>> {
    d.iter().map(|(&k, v)| if v.is_zero() { Err(Error::ZeroDiagonal { index: k as usize }) } else { Ok((k, v.recip())) }).collect()
}

/// Largest `|j - k|` with a nonzero certified entry.
pub fn bandwidth(op: &WindowedOperator) -> i64 {
    let (lo, hi) = op.window();
    let mut w = 0;
    for j in lo..=hi {
        for k in lo..=hi {
            if op.is_exact(j, k) && !op.window_entry(j, k).is_zero() {
                w = w.max((j - k).abs());
            }
        }
    }
    w
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxInverse {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    /// Estimate of `(G₂₂)⁻¹` on indices `-p..n-1`, as floats.
    pub estimate: Vec<Vec<f64>>,
    /// `‖G₂₂·estimate − I‖_∞`.
    pub residual: f64,
    /// `‖estimate − (G₂₂)⁻¹‖_∞` from the exact inverse.
    pub error: f64,
}

/// Window used by [`approximate_w_inverse`].
pub fn approximate_inverse_window(n: usize, p: usize) -> (i64, i64) {
    (-(p as i64) - 3 * n as i64 - 4, n as i64 + 1)
}

fn inf_norm(m: &[Vec<f64>]) -> f64 {
    m.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `Υ¹₂₂Λ¹₂₂ − Λ²₂₁Υ²₁₂` with block 2 the indices `-p..n-1` and block 1
/// the indices below.
pub fn approximate_w_inverse(f: &TransitionFamily, p: usize) -> Result<ApproxInverse> {
    let n = f.n;
    let report = check_assumption(&f.weights, 0..n as i64);
    let rho = report.report()?.rho;
    let (lo, hi) = approximate_inverse_window(n, p);
    let lu = lu_decompose(f, lo, hi)?;
    let ul = ul_decompose(f, lo, hi)?;
    let one = invert_lu(&lu)?;
    let two = invert_ul(&ul)?;
    let (b_lo, b_hi) = (-(p as i64), n as i64 - 1);
    let size = (b_hi - b_lo + 1) as usize;
    let first = one.upsilon.block(b_lo, b_hi, b_lo, b_hi)?.mul(&one.lambda.block(b_lo, b_hi, b_lo, b_hi)?)?;
    // Λ² is banded, so only a few columns below the block contribute
    let depth = two.lambda.bands().0.unwrap_or(n as i64).max(1);
    let (m_lo, m_hi) = (b_lo - depth, b_lo - 1);
    let second = two.lambda.block(b_lo, b_hi, m_lo, m_hi)?.mul(&two.upsilon.block(m_lo, m_hi, b_lo, b_hi)?)?;
    let estimate = first.sub(&second)?;
    let g22 = g_operator(f, lo, hi)?.block(b_lo, b_hi, b_lo, b_hi)?;
    let resid = g22.mul(&estimate)?.sub(&RationalMatrix::identity(size))?;
    let exact_inv = g22.inverse()?;
    let to_rows = |m: &RationalMatrix| -> Vec<Vec<f64>> { m.to_rows().iter().map(|r| r.iter().map(to_f64).collect()).collect() };
    Ok(ApproxInverse {
        n,
        p,
        rho,
        residual: inf_norm(&to_rows(&resid)),
        error: inf_norm(&to_rows(&estimate.sub(&exact_inv)?)),
        estimate: to_rows(&estimate),
    })
}

/// Slope fit `log y ≈ c + t·log r` over `(t, y)`; returns `r` and the
/// coefficient of determination.
pub fn fit_rate(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope.exp(), r2)
}

/// The kernel of the limit `p → ∞` for heights `x ≥ -1`.
pub struct LimitKernel {
    ops: Vec<WindowedOperator>,
    prefix: Vec<WindowedOperator>,
    suffix: Vec<WindowedOperator>,
    lambda: WindowedOperator,
    upsilon: WindowedOperator,
    n: i64,
    /// Number of terms kept in the inner sum over `k`.
    pub depth: i64,
    pub assumption: AssumptionReport,
}

/// `⌈log(tol(1-ρ)/R²)/log ρ⌉`, at least 1.
pub fn truncation_depth(tol: f64, rho: f64, r: f64) -> Result<i64> {
    if !(rho > 0.0 && rho < 1.0) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Assumption(format!("cannot bound the tail with rho = {rho}, tol = {tol}")));
    }
    let d = ((tol * (1.0 - rho) / (r * r)).ln() / rho.ln()).ceil();
    if !d.is_finite() || d > 4000.0 {
        return Err(Error::Assumption(format!("tail bound needs {d} terms")));
    }
    Ok((d as i64).max(1))
}

/// Largest exact window [`LimitKernel::new`] builds.
pub const MAX_LIMIT_WINDOW: i64 = 240;

impl LimitKernel {
    pub fn new(f: &TransitionFamily, tol: f64) -> Result<Self> {
        let n = f.n as i64;
        let check = check_assumption(&f.weights, 0..n);
        let assumption = check.report()?.clone();
        let depth = truncation_depth(tol, assumption.rho, assumption.r)?;
        let (lo, hi) = (-depth - 2 * n - 3, n + 2);
        if hi - lo + 1 > MAX_LIMIT_WINDOW {
            return Err(Error::Capacity(format!(
                "rho = {:.4} needs a window of {} rows, above {MAX_LIMIT_WINDOW}",
                assumption.rho,
                hi - lo + 1
            )));
        }
        let lu = lu_decompose(f, lo, hi)?;
        let inv = invert_lu(&lu)?;
        let ops = f.operators(lo, hi)?;
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
        Ok(LimitKernel { ops, prefix, suffix, lambda: inv.lambda, upsilon: inv.upsilon, n, depth, assumption })
    }

    /// Exact value of the truncated series.
    pub fn kernel_exact(&self, m1: usize, x1: i64, m2: usize, x2: i64) -> Result<Rational> {
        let len = self.ops.len();
        if m1 > len || m2 > len {
            return Err(Error::Domain(format!("times must lie in [0, {len}]")));
        }
        if x1 < -1 || x2 < -1 {
            return Err(Error::Domain(format!("heights ({x1}, {x2}) below -1 are outside the kernel's range")));
        }
        let n = self.n;
        let mut total = Rational::zero();
        if m1 < m2 {
            let mut p = WindowedOperator::identity(self.ops[0].window().0, self.ops[0].window().1)?;
            for op in &self.ops[m1..m2] {
                p = p.mul(op)?;
            }
            total -= p.entry(x1, x2)?;
        }
        let left = &self.suffix[m1];
        let right = &self.prefix[m2];
        for l in 1..=(n - x2) {
            let row = n - l;
            // (Λ P(0, m₂))(n-ℓ, x₂)
            let mut b = Rational::zero();
            for t in row - self.lambda_band()..=row {
                let lam = self.lambda.entry(row, t)?;
                if !lam.is_zero() {
                    b += lam * right.entry(t, x2)?;
                }
            }
            if b.is_zero() {
                continue;
            }
            // (P(m₁, 2n) S^{-n} Υ)(x₁, n-ℓ), truncated below
            let k_hi = (x1 + n).min(row);
            let mut a = Rational::zero();
            for k in k_hi - self.depth..=k_hi {
                let pv = left.entry(x1, k - n)?;
                if !pv.is_zero() {
                    a += pv * self.upsilon.entry(k, row)?;
                }
            }
            total += a * b;
        }
        Ok(total)
    }

    fn lambda_band(&self) -> i64 {
        2 * self.n + 1
    }

    pub fn kernel(&self, m1: usize, x1: i64, m2: usize, x2: i64) -> Result<f64> {
        Ok(to_f64(&self.kernel_exact(m1, x1, m2, x2)?))
    }
}

/// One query of the limit kernel with tail tolerance `tol`.
pub fn limit_kernel(f: &TransitionFamily, query: (usize, i64, usize, i64), tol: f64) -> Result<f64> {
    let (m1, x1, m2, x2) = query;
    LimitKernel::new(f, tol)?.kernel(m1, x1, m2, x2)
}
