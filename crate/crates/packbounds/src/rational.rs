//! Exact rational arithmetic.
//!
//! Every size, volume, bound value, and branch decision in this crate goes
//! through [`Rational`], a thin wrapper around [`num_rational::BigRational`]
//! kept in canonical reduced form. No floating point is used anywhere, so
//! results are reproducible and comparisons at branch boundaries (`x > 1/2`,
//! `x >= eps`, ...) are exact.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An arbitrary-precision rational number in canonical reduced form.
///
/// Structural equality coincides with numeric equality: `2/4` and `1/2`
/// construct the same value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    /// `numer/denom`, reduced. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `numer/denom` from big integers. Panics if `denom == 0`.
    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn one_half() -> Self {
        Rational::new(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// `ceil` narrowed to `i64`; panics if it does not fit (desk-scale use).
    pub fn ceil_i64(&self) -> i64 {
        self.ceil().to_i64().expect("ceil out of i64 range")
    }

    /// `floor` narrowed to `i64`; panics if it does not fit.
    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor out of i64 range")
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Parses `p` or `p/q` with an optional leading sign and no embedded
    /// whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RationalError::Malformed(s.to_string());
        let (numer_str, denom_str) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let numer: BigInt = numer_str.parse().map_err(|_| bad())?;
        let denom: BigInt = match denom_str {
            Some(d) => {
                // Reject a signed denominator so `p/q` has one canonical spelling.
                if d.starts_with('+') || d.starts_with('-') {
                    return Err(bad());
                }
                d.parse().map_err(|_| bad())?
            }
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(RationalError::ZeroDenominator(s.to_string()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(-3, -6), r(1, 2));
        assert_eq!(r(3, -6), r(-1, 2));
        assert_eq!(r(0, 7), Rational::zero());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("2/5".parse::<Rational>().unwrap(), r(2, 5));
        assert_eq!("8/20".parse::<Rational>().unwrap(), r(2, 5));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_int(7));
        assert_eq!("-1/3".parse::<Rational>().unwrap(), r(-1, 3));
        assert_eq!(r(284, 260).to_string(), "71/65");
        assert_eq!(Rational::from_int(4).to_string(), "4");
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(RationalError::ZeroDenominator(_))
        ));
        assert!("".parse::<Rational>().is_err());
        assert!("1/ 2".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(r(7, 2).floor_i64(), 3);
        assert_eq!(r(7, 2).ceil_i64(), 4);
        assert_eq!(r(-7, 2).floor_i64(), -4);
        assert_eq!(r(-7, 2).ceil_i64(), -3);
        assert_eq!(Rational::from_int(5).ceil_i64(), 5);
        assert_eq!(Rational::from_int(5).floor_i64(), 5);
        assert_eq!(r(9, 8).ceil_i64(), 2);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(1, 2) - r(1, 3), r(1, 6));
        assert_eq!(r(2, 3) * r(3, 4), r(1, 2));
        assert_eq!(r(1, 2) / r(1, 4), Rational::from_int(2));
        assert_eq!(r(2, 5).recip(), r(5, 2));
        let total: Rational = [r(1, 2), r(1, 3), r(1, 6)].iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn ordering() {
        assert!(r(2, 5) < r(1, 2));
        assert!(r(1, 2) <= r(1, 2));
        assert!(r(7, 13) > r(1, 2));
        assert_eq!(r(1, 3).max(r(1, 2)), r(1, 2));
        assert_eq!(r(1, 3).min(r(1, 2)), r(1, 3));
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(n in -1000i64..1000, d in 1i64..1000) {
            let x = r(n, d);
            let back: Rational = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn add_sub_cancel(a in -100i64..100, b in 1i64..100, c in -100i64..100, e in 1i64..100) {
            let x = r(a, b);
            let y = r(c, e);
            prop_assert_eq!(&x + &y - &y, x);
        }

        #[test]
        fn floor_ceil_bracket(a in -500i64..500, b in 1i64..90) {
            let x = r(a, b);
            let fl = Rational::from_bigint(x.floor());
            let ce = Rational::from_bigint(x.ceil());
            prop_assert!(fl <= x && x <= ce);
            prop_assert!(&ce - &fl <= Rational::one());
            if x.is_integer() {
                prop_assert_eq!(fl, ce);
            }
        }
    }
}
