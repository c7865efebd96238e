//! Arbitrary-precision rationals.
//!
//! Values are always kept in lowest terms with a positive denominator; zero is
//! `0/1`. The textual form used in every file format is `"num/den"`, with the
//! denominator always written out so that records are byte-stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical `num/den` text.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer. The result is reduced.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let text = text.trim();
    let bad = || AlgebraError::Parse(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(AlgebraError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// Height = max(|num|, den); used to bound sampled parameters.
pub fn height(r: &Rational) -> BigInt {
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

pub fn sign_power(exp: i64) -> Rational {
    if exp.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text() {
        assert_eq!(format_rational(&ratio(4, -6)), "-2/3");
        assert_eq!(format_rational(&int(620)), "620/1");
        assert_eq!(format_rational(&zero()), "0/1");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational(" -10/4 ").unwrap(), ratio(-5, 2));
        assert!(matches!(
            parse_rational("1/0"),
            Err(AlgebraError::ZeroDenominator)
        ));
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn reduced_and_positive_denominator() {
        let r = ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn signs() {
        assert_eq!(sign_power(3), int(-1));
        assert_eq!(sign_power(-2), int(1));
        assert_eq!(height(&ratio(-7, 3)), BigInt::from(7));
    }
}
