//! Arbitrary-precision rationals and their `"num/den"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced rational with a positive denominator.
pub type BigRat = BigRational;

/// Parses `"num/den"` or a bare integer. Whitespace around the parts is
/// tolerated, decimals are not.
pub fn parse_rational(s: &str) -> Result<BigRat> {
    let bad = || Error::MalformedRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRat::new(num, den))
}

/// Canonical text form: `"num/den"` in lowest terms, or just `"num"` when
/// the denominator is one.
pub fn format_rational(r: &BigRat) -> String {
    r.to_string()
}

/// Nearest `f64`. Handles operands that overflow `f64` individually.
pub fn to_f64(r: &BigRat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `0 <= r <= 1`.
pub fn is_probability(r: &BigRat) -> bool {
    !r.is_negative() && *r <= BigRat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let r = parse_rational("6361/55440").unwrap();
        assert_eq!(format_rational(&r), "6361/55440");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational(" 3 ").unwrap()), "3");
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn huge_to_f64() {
        let big = BigInt::from(3u8).pow(2000);
        let r = BigRat::new(big.clone(), big * 2);
        assert_eq!(to_f64(&r), 0.5);
    }
}
