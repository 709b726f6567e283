use super::{rational_to_string, Field, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GaussianRational {
    #[serde(with = "super::serde_rational")]
    pub re: Rational,
    #[serde(with = "super::serde_rational")]
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn imag(im: Rational) -> Self {
        GaussianRational { re: Rational::zero(), im }
    }

    pub fn i() -> Self {
        Self::imag(Rational::one())
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::real(Rational::one()),
            1 => Self::i(),
            2 => Self::real(-Rational::one()),
            _ => Self::imag(-Rational::one()),
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        GaussianRational { re: &self.re / &n, im: -&self.im / &n }
    }

    /// One of `1, i, -1, -i` when the value is a nonzero real or purely
    /// imaginary number, else `None`.
    pub fn unit_phase(&self) -> Option<Self> {
        use num_traits::Signed;
        if self.im.is_zero() && !self.re.is_zero() {
            Some(Self::i_pow(if self.re.is_positive() { 0 } else { 2 }))
        } else if self.re.is_zero() && !self.im.is_zero() {
            Some(Self::i_pow(if self.im.is_positive() { 1 } else { 3 }))
        } else {
            None
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (super::to_f64(&self.re), super::to_f64(&self.im))
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Signed;
        let coeff = |x: &Rational| if x.is_one() { String::new() } else { rational_to_string(x) };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", rational_to_string(&self.re)),
            (true, false) if self.im.is_negative() => write!(f, "-{}i", coeff(&self.im.abs())),
            (true, false) => write!(f, "{}i", coeff(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", rational_to_string(&self.re), sign, coeff(&self.im.abs()))
            }
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: &GaussianRational) -> GaussianRational {
        if o.im.is_zero() {
            assert!(!o.re.is_zero(), "division by zero Gaussian rational");
            return GaussianRational { re: &self.re / &o.re, im: &self.im / &o.re };
        }
        self * &o.inv()
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);
by_value!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Field for GaussianRational {
    fn zero_value() -> Self {
        Self::real(Rational::zero())
    }
    fn one_value() -> Self {
        Self::real(Rational::one())
    }
    fn is_zero_value(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
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
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, rat};

    #[test]
    fn powers_of_i_cycle() {
        assert_eq!(GaussianRational::i_pow(2), GaussianRational::real(int(-1)));
        assert_eq!(GaussianRational::i_pow(-1), GaussianRational::imag(int(-1)));
        assert_eq!(&GaussianRational::i() * &GaussianRational::i(), GaussianRational::i_pow(2));
    }

    #[test]
    fn division_roundtrip() {
        let a = GaussianRational::new(rat(3, 2), rat(-1, 5));
        let b = GaussianRational::new(int(2), int(7));
        assert_eq!(&(&a / &b) * &b, a);
    }

    #[test]
    fn display() {
        assert_eq!(GaussianRational::new(int(1), rat(-1, 2)).to_string(), "1-1/2i");
        assert_eq!(GaussianRational::imag(int(3)).to_string(), "3i");
        assert_eq!(GaussianRational::i_pow(3).to_string(), "-i");
        assert_eq!(GaussianRational::new(int(2), int(1)).to_string(), "2+i");
    }
}
