//! Number backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`], which is
//! implemented for `f64` (binary floating point, comparisons carry a small
//! slack) and for [`Rational`] (arbitrary precision rationals, comparisons
//! are exact). Transcendental quantities such as logarithms are always
//! evaluated in `f64`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number used by the exact backend.
pub type Rational = BigRational;

/// Slack used by floating-point comparisons against quantities of order one.
pub const FLOAT_EPS: f64 = 1e-12;

/// Arithmetic backend shared by every operation of the crate.
pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic and comparisons are exact.
    const EXACT: bool;
    /// Absolute comparison slack; `0.0` for exact backends.
    const EPS: f64;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Largest integer not above `self`, as a scalar.
    fn floor_val(&self) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// The exact rational value, if this backend carries one.
    fn to_rational(&self) -> Option<Rational>;

    /// Parse `p/q`, an integer, or a decimal literal such as `1.25` or `2e-3`.
    fn parse_str(s: &str) -> Result<Self>;

    /// Serialization form: exact values become `"p/q"` strings, floats stay numbers.
    fn repr(&self) -> ScalarRepr;

    fn ln(&self) -> f64 {
        self.to_f64_lossy().ln()
    }

    /// Storage size in bits; constant zero for fixed-width backends.
    fn size_bits(&self) -> u64 {
        0
    }
}

/// JSON representation of a scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Num(f64),
    Str(String),
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const EPS: f64 = FLOAT_EPS;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn floor_val(&self) -> Self {
        self.floor()
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn parse_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = parse_f64(p)?;
            let q: f64 = parse_f64(q)?;
            if q == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(p / q);
        }
        parse_f64(s)
    }

    fn repr(&self) -> ScalarRepr {
        ScalarRepr::Num(*self)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const EPS: f64 = 0.0;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn floor_val(&self) -> Self {
        self.floor()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn parse_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_decimal(p)?;
            let q = parse_decimal(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(p / q);
        }
        parse_decimal(s)
    }

    fn repr(&self) -> ScalarRepr {
        ScalarRepr::Str(format_rational(self))
    }

    fn size_bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a decimal literal (`-12`, `0.125`, `1.5e-3`) into its exact rational value.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::parse_bytes(all_digits.as_bytes(), 10).ok_or_else(bad)?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Equality up to the backend slack.
pub fn approx_eq<T: Scalar>(x: &T, y: &T) -> bool {
    if T::EXACT {
        x == y
    } else {
        (x.clone() - y.clone()).abs().to_f64_lossy() <= T::EPS
    }
}

/// `x <= y` up to the backend slack.
pub fn approx_le<T: Scalar>(x: &T, y: &T) -> bool {
    if T::EXACT {
        x <= y
    } else {
        x.to_f64_lossy() <= y.to_f64_lossy() + T::EPS
    }
}

pub fn min_of<T: Scalar>(x: &T, y: &T) -> T {
    if x <= y {
        x.clone()
    } else {
        y.clone()
    }
}

pub fn max_of<T: Scalar>(x: &T, y: &T) -> T {
    if x >= y {
        x.clone()
    } else {
        y.clone()
    }
}

/// Integer power with a possibly negative exponent.
pub fn powi<T: Scalar>(x: &T, n: i64) -> T {
    let base = if n < 0 {
        T::one() / x.clone()
    } else {
        x.clone()
    };
    num_traits::pow(base, n.unsigned_abs() as usize)
}

pub(crate) fn serialize_scalar<S: Serializer, T: Scalar>(
    x: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.repr().serialize(s)
}

pub(crate) fn serialize_scalars<S: Serializer, T: Scalar>(
    xs: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(Scalar::repr))
}

pub(crate) fn serialize_opt_scalar<S: Serializer, T: Scalar>(
    x: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(Scalar::repr).serialize(s)
}

pub(crate) fn serialize_intervals<S: Serializer, T: Scalar>(
    xs: &[(T, T)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|(lo, hi)| [lo.repr(), hi.repr()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("1.2").unwrap(), q(6, 5));
        assert_eq!(parse_decimal("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_decimal("15e-1").unwrap(), q(3, 2));
        assert_eq!(parse_decimal(".5").unwrap(), q(1, 2));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
    }

    #[test]
    fn fractions_parse_in_both_backends() {
        assert_eq!(Rational::parse_str("1/7").unwrap(), q(1, 7));
        assert_eq!(Rational::parse_str("0.5/2").unwrap(), q(1, 4));
        assert!((f64::parse_str("1/3").unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(f64::parse_str("1/0").is_err());
        assert!(Rational::parse_str("1/0").is_err());
    }

    #[test]
    fn rational_repr_is_lowest_terms() {
        assert_eq!(q(4, 6).repr(), ScalarRepr::Str("2/3".into()));
        assert_eq!(q(4, 2).repr(), ScalarRepr::Str("2".into()));
        assert_eq!(0.5f64.repr(), ScalarRepr::Num(0.5));
    }

    #[test]
    fn negative_powers() {
        assert_eq!(powi(&q(1, 4), -3), q(64, 1));
        assert_eq!(powi(&2.0f64, -2), 0.25);
    }
}
