//! Exact rational arithmetic used by every computation in the crate.
//!
//! All core computation is exact; decimal rendering exists only for display.
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with
//! a positive denominator, so equality tests on flow values are exact.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from an integer.
pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Rational from an unsigned size.
pub fn rat_usize(value: usize) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Formats a rational as `"num/den"`, or just `"num"` when integral.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `"num"` or `"num/den"` back into a rational.
///
/// Inverse of [`format_rational`] on every value the crate produces.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| Error::InvalidParameters(format!("bad rational numerator in {text:?}")))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| Error::InvalidParameters(format!("bad rational denominator in {text:?}")))?;
    if denom.is_zero() {
        return Err(Error::InvalidParameters(format!(
            "zero denominator in {text:?}"
        )));
    }
    Ok(Rational::new(numer, denom))
}

/// Decimal rendering with the given number of fraction digits, for display
/// only. Rounds half away from zero.
pub fn decimal_string(value: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = value * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let sign = if rounded.is_negative() { "-" } else { "" };
    let abs = rounded.abs();
    let whole = &abs / &scale;
    let frac = &abs % &scale;
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0>width$}", width = digits as usize)
    }
}

/// Sums an iterator of rationals.
pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}
