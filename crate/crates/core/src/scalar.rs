//! Arithmetic abstraction shared by the geometry and LP code.
//!
//! Two number types are supported: exact `BigRational` (tolerance zero) and
//! `f64` (tolerance `1e-9`). Every comparison that can be affected by rounding
//! goes through the tolerance-aware helpers here.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for everything read from a network file.
pub type Rational = BigRational;

/// Feasibility and deduplication tolerance of floating mode.
pub const FLOAT_TOL: f64 = 1e-9;

pub trait Scalar:
    num_traits::Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact value when the representation allows it.
    fn to_rational(&self) -> Option<Rational>;

    fn tolerance() -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn near_zero(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    /// Strictly positive beyond the tolerance.
    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    /// Strictly negative beyond the tolerance.
    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).near_zero()
    }

    /// `self <= other` up to the tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        !(self.clone() - other.clone()).is_pos()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn near_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn tolerance() -> Self {
        FLOAT_TOL
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    // huge numerators and denominators: scale down both before dividing
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Parse a decimal (`0.05`, `-1.5e-3`) or fraction (`2/7`) literal exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Render a rational as a plain decimal when its expansion terminates.
pub fn terminating_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let int = scaled.to_integer();
    if places == 0 {
        return Some(int.to_string());
    }
    let negative = int.is_negative();
    let digits = int.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = padded.split_at(padded.len() - places);
    Some(format!("{}{whole}.{frac}", if negative { "-" } else { "" }))
}

/// `p/q` form, always with an explicit denominator.
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Convenience constructor used throughout the tests.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_rational("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), ratio(-3, 2000));
        assert_eq!(parse_rational("2/7").unwrap(), ratio(2, 7));
        assert_eq!(parse_rational("1").unwrap(), ratio(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational("").is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(terminating_decimal(&ratio(1, 20)).unwrap(), "0.05");
        assert_eq!(terminating_decimal(&ratio(-3, 8)).unwrap(), "-0.375");
        assert_eq!(terminating_decimal(&ratio(7, 1)).unwrap(), "7");
        assert!(terminating_decimal(&ratio(1, 3)).is_none());
    }

    #[test]
    fn float_tolerance_helpers() {
        assert!(1e-12f64.near_zero());
        assert!(!1e-6f64.near_zero());
        assert!(0.3f64.approx_eq(&(0.1 + 0.2)));
        assert!(!ratio(1, 1_000_000_000_000).near_zero());
    }
}
