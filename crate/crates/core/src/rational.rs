//! Exact rational scalars and the helpers the rest of the crate leans on.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a rational")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` reduced. Panics on `d == 0`, which is a programming error in fixtures.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`; whitespace around the parts is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() || den.is_negative() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"num/den"` form, denominator always written.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Division with the `0/0 = 0` convention. `None` when a nonzero numerator meets a zero denominator.
pub fn div_or_zero(num: &Rational, den: &Rational) -> Option<Rational> {
    if den.is_zero() {
        num.is_zero().then(Rational::zero)
    } else {
        Some(num / den)
    }
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && *q <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let q = parse_rational("6/8").unwrap();
        assert_eq!(q, ratio(3, 4));
        assert_eq!(format_rational(&q), "3/4");
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(parse_rational("-5").unwrap(), int(-5));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational(" 1/2").is_err());
        assert!(parse_rational("a").is_err());
    }

    #[test]
    fn zero_over_zero_is_zero() {
        assert_eq!(div_or_zero(&zero(), &zero()), Some(zero()));
        assert_eq!(div_or_zero(&one(), &zero()), None);
        assert_eq!(div_or_zero(&one(), &int(4)), Some(ratio(1, 4)));
    }
}
