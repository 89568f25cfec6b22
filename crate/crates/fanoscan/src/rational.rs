//! Exact rational arithmetic.
//!
//! Every numeric quantity in this crate that is not manifestly an integer
//! (Chern-number combinations, orbifold correction terms, slope bounds) is a
//! [`Rational`]. No floating point is used anywhere: equality and order are
//! always exact, so a bound that holds by a margin of `1/5471` is
//! distinguishable from one that fails by the same margin.
//!
//! The type is a thin wrapper around an arbitrary-precision fraction that is
//! kept in canonical reduced form: `gcd(num, den) = 1` and `den >= 1`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact rational number in reduced form with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num / den`. Panics if `den == 0`; reduction and sign
    /// normalization are automatic.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The integer `n` as a rational.
    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Zero.
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    /// One.
    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Numerator of the reduced form (carries the sign).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator of the reduced form; always >= 1.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// True iff the denominator is 1.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True iff the value is a nonnegative integer.
    pub fn is_nonnegative_integer(&self) -> bool {
        self.is_integer() && !self.0.is_negative()
    }

    /// True iff the value is zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True iff the value is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Largest integer `<= self`.
    pub fn floor_bigint(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Largest nonnegative `u64` that is `<= self`, if the value is
    /// nonnegative and fits.
    pub fn floor_u64(&self) -> Option<u64> {
        self.floor_bigint().to_u64()
    }

    /// Exact conversion to `u64`; `None` unless the value is a nonnegative
    /// integer that fits.
    pub fn to_u64_exact(&self) -> Option<u64> {
        if self.is_integer() {
            self.0.to_integer().to_u64()
        } else {
            None
        }
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Renders as `num/den`, or as the bare integer when the denominator is 1.
/// This is the only serialization of rationals used by the crate (reports,
/// tables, JSON): decimal notation is never emitted.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses `"a/b"`, a bare integer `"a"`, or exact decimal notation `"a.b"`
/// (so `"3.2"` denotes 16/5 exactly, not a float).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational literal".into()));
        }
        let parse_int = |t: &str| -> Result<BigInt, Error> {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid integer literal '{t}'")))
        };
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_int(num.trim())?;
            let den = parse_int(den.trim())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            return Ok(Rational(BigRational::new(num, den)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("invalid decimal literal '{s}'")));
            }
            let negative = int_part.trim_start().starts_with('-');
            let int = parse_int(int_part)?;
            let frac = parse_int(frac_part)?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let signed_frac = if negative { -frac } else { frac };
            return Ok(Rational(BigRational::new(int * &scale + signed_frac, scale)));
        }
        Ok(Rational(BigRational::from_integer(parse_int(s)?)))
    }
}

/// Serializes as the display string: `"num/den"` in reduced form, or a bare
/// integer string — never a decimal.
impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_canonical() {
        assert_eq!(Rational::new(6, 4), Rational::new(3, 2));
        assert_eq!(Rational::new(-6, -4), Rational::new(3, 2));
        assert_eq!(Rational::new(6, -4), Rational::new(-3, 2));
        assert_eq!(*Rational::new(6, -4).denom(), BigInt::from(2));
    }

    #[test]
    fn display_integers_plainly() {
        assert_eq!(Rational::new(8, 4).to_string(), "2");
        assert_eq!(Rational::new(16, 5).to_string(), "16/5");
        assert_eq!(Rational::new(-1, 8).to_string(), "-1/8");
        assert_eq!(Rational::zero().to_string(), "0");
    }

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!("16/5".parse::<Rational>().unwrap(), Rational::new(16, 5));
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::from_integer(3));
        assert_eq!("3.2".parse::<Rational>().unwrap(), Rational::new(16, 5));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), Rational::new(-1, 4));
        assert_eq!(" 1361/330 ".parse::<Rational>().unwrap(), Rational::new(1361, 330));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!("".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("3.".parse::<Rational>().is_err());
        assert!("3.2.1".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
    }

    #[test]
    fn serializes_as_reduced_fraction_strings() {
        let b = Rational::new(1361, 330);
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"1361/330\"");
        assert_eq!(serde_json::to_string(&Rational::new(14, 2)).unwrap(), "\"7\"");
        let back: Rational = serde_json::from_str("\"16/5\"").unwrap();
        assert_eq!(back, Rational::new(16, 5));
        assert!(serde_json::from_str::<Rational>("\"1/0\"").is_err());
    }

    #[test]
    fn exact_comparisons() {
        // 16/5 sits strictly between 3 and 4, and 3.3 is not 16/5.
        let b = Rational::new(16, 5);
        assert!(Rational::from_integer(3) < b);
        assert!(b < Rational::from_integer(4));
        assert_ne!("3.3".parse::<Rational>().unwrap(), b);
    }

    #[test]
    fn integrality_queries() {
        assert!(Rational::new(10, 5).is_nonnegative_integer());
        assert!(!Rational::new(-10, 5).is_nonnegative_integer());
        assert!(!Rational::new(1, 3).is_integer());
        assert_eq!(Rational::new(7, 2).floor_u64(), Some(3));
        assert_eq!(Rational::new(21, 3).to_u64_exact(), Some(7));
        assert_eq!(Rational::new(22, 3).to_u64_exact(), None);
    }
}
