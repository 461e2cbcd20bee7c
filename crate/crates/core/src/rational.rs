//! Exact rationals with a fixed `num/den` text form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
/// Displays as `num/den` even when the denominator is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics when `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `1 / p^k`.
    pub fn inverse_power(p: u32, k: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::from(p).pow(k)))
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

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n`, `n/d` and `-n/d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a rational number: `{s}`"));
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Rational::from_bigints(num, den).map_err(|_| bad())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }

        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_always_has_denominator() {
        assert_eq!(Rational::integer(1).to_string(), "1/1");
        assert_eq!(Rational::new(2, -8).to_string(), "-1/4");
        assert_eq!(Rational::zero().to_string(), "0/1");
    }

    #[test]
    fn parse_and_serde_round_trip() {
        for s in ["3/4", "-1/2", "7", " 10/4 "] {
            let r: Rational = s.parse().unwrap();
            let json = serde_json::to_string(&r).unwrap();
            let back: Rational = serde_json::from_str(&json).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!("10/4".parse::<Rational>().unwrap(), Rational::new(5, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn arithmetic_and_order() {
        let a = Rational::new(3, 4);
        let b = Rational::inverse_power(2, 2);
        assert_eq!(&a + &b, Rational::one());
        assert_eq!(&a - &b, Rational::new(1, 2));
        assert!(b < a);
        assert_eq!(Rational::new(3, 4).ceil(), BigInt::from(1));
        assert_eq!(Rational::new(-3, 4).ceil(), BigInt::from(0));
    }
}
