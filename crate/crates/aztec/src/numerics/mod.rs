//! Exact scalars and dense matrices.
//!
//! Everything outside [`crate::periodic`] computes with [`Rational`] or
//! [`GaussianRational`] entries, so identities can be checked with `==`.

mod gaussian;
mod matrix;

pub use gaussian::GaussianRational;
pub use matrix::{Matrix, Orientation};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

/// Dense matrix of Gaussian rationals.
pub type ExactMatrix = Matrix<GaussianRational>;

/// Dense matrix of rationals.
pub type RationalMatrix = Matrix<Rational>;

/// Minimal field interface used by the generic matrix code.
pub trait Field: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Panics when `other` is zero.
    fn over(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn render(&self) -> String;
}

impl Field for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        assert!(!Zero::is_zero(other), "division by zero rational");
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn render(&self) -> String {
        rational_to_string(self)
    }
}

/// `n/d` as a canonical rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders `p/q`, or `p` when `q = 1`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Nearest `f64`; huge values saturate to infinity.
pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down by a common power of two
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            if d == 0.0 {
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Determinant of a square Gaussian-rational matrix.
pub fn exact_det(m: &ExactMatrix) -> Result<GaussianRational> {
    m.det()
}

/// Exact two-sided inverse.
pub fn exact_inverse(m: &ExactMatrix) -> Result<ExactMatrix> {
    m.inverse()
}

/// Inverse of a triangular matrix by substitution.
pub fn triangular_inverse(m: &ExactMatrix, orientation: Orientation) -> Result<ExactMatrix> {
    m.triangular_inverse(orientation)
}

/// Serde helpers rendering rationals as strings.
pub mod serde_rational {
    use super::{parse_rational, rational_to_string, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_rational(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn render_forms() {
        assert_eq!(rational_to_string(&rat(4, 2)), "2");
        assert_eq!(rational_to_string(&rat(-1, 3)), "-1/3");
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = Rational::from_integer(num_traits::pow(BigInt::from(10), 400));
        let r = &big / (&big * int(4));
        assert!((to_f64(&r) - 0.25).abs() < 1e-15);
    }
}
