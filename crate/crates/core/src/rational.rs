//! Exact rational scalars.
//!
//! The scalar field is `num_rational::BigRational`, which already keeps
//! numerator and denominator coprime with a positive denominator. This module
//! adds the textual encoding used by every JSON output: `"p/q"`, or `"p"` when
//! the denominator is one.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical text for a rational: `p/q`, or `p` when `q == 1`.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, `p/q` (whitespace around the parts is ignored).
pub fn parse(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Least common multiple of the denominators, used to clear fractions.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| {
        num_integer::Integer::lcm(&acc, r.denom())
    })
}

/// Greatest common divisor of the numerators (nonnegative).
pub(crate) fn numerator_gcd<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |acc, r| {
        num_integer::Integer::gcd(&acc, r.numer())
    })
    .abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        assert_eq!(format(&ratio(6, -4)), "-3/2");
        assert_eq!(format(&int(7)), "7");
        assert_eq!(format(&int(0)), "0");
        assert_eq!(parse(" -3 / 2 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse("4/2").unwrap(), int(2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn lcm_and_gcd_helpers() {
        let v = [ratio(1, 4), ratio(3, 6), int(5)];
        assert_eq!(denominator_lcm(&v), BigInt::from(4));
        let w = [int(6), int(-9)];
        assert_eq!(numerator_gcd(&w), BigInt::from(3));
    }
}
