//! Rational helpers on top of `BigRational`, which already keeps values reduced
//! with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `b^e` for any integer exponent; `b` must be nonzero when `e < 0`.
pub fn pow(b: &Rat, e: i32) -> Rat {
    if e >= 0 {
        num_traits::pow(b.clone(), e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// `q^e` for an integer base.
pub fn qpow(q: u64, e: i32) -> Rat {
    pow(&int(q as i64), e)
}

pub fn to_f64(r: &Rat) -> f64 {
    // Scale big operands so the quotient stays in range.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Parses "a", "a/b" or a finite decimal such as "-1.25".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole_digits}{frac_part}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let v = Rat::new(digits, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(r: &Rat, p: u64) -> i64 {
    assert!(!r.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut v = 0i64;
    let mut n = r.numer().clone();
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    let mut d = r.denom().clone();
    while (&d % &pb).is_zero() {
        d /= &pb;
        v -= 1;
    }
    v
}
