//! Exact rational scalars and their text forms.
//!
//! All probability arithmetic in this crate is exact. Rationals are
//! serialized as `"p/q"` (or a bare integer string); decimals exist only as
//! an opt-in display rendering.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rat = BigRational;

/// Rational zero.
pub fn zero() -> Rat {
    Rat::zero()
}

/// Rational one.
pub fn one() -> Rat {
    Rat::one()
}

/// Rational from an integer.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`; panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
    }
}

/// Formats a rational as `"p/q"`, or a bare integer when the denominator
/// is one. The inverse of [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `r` as a decimal with exactly `digits` fractional digits,
/// rounding half away from zero. Display only; never used in computation.
pub fn decimal_rendering(r: &Rat, digits: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = abs.numer() * &scale;
    let (mut q, rem) = num::Integer::div_rem(&scaled, abs.denom());
    if &rem * 2 >= *abs.denom() {
        q += 1;
    }
    let digits = digits as usize;
    let s = q.to_string();
    if digits == 0 {
        return format!("{sign}{s}");
    }
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    format!("{sign}{int_part}.{frac_part}")
}

/// Lossy conversion to `f64` for the float-checked inequality cases.
pub fn to_f64(r: &Rat) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-3", "1/2", "-7/8", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("4/2").unwrap()), "2");
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "a", "1/0", "1/2/3", "0.5"] {
            assert!(parse_rat(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn decimal_rounds_half_away_from_zero() {
        assert_eq!(decimal_rendering(&ratio(1, 2), 2), "0.50");
        assert_eq!(decimal_rendering(&ratio(1, 3), 4), "0.3333");
        assert_eq!(decimal_rendering(&ratio(2, 3), 2), "0.67");
        assert_eq!(decimal_rendering(&ratio(1, 8), 2), "0.13");
        assert_eq!(decimal_rendering(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(decimal_rendering(&int(3), 0), "3");
        assert_eq!(decimal_rendering(&ratio(5, 4), 1), "1.3");
    }
}
