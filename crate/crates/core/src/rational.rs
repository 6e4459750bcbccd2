//! Exact rational helpers. All duty cycles and bounds are carried as
//! `Ratio<i128>`; conversion to `f64` only happens at presentation time.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{NdError, Result};

pub type Rational = num_rational::Ratio<i128>;

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

pub fn ceil(r: Rational) -> i128 {
    r.ceil().to_integer()
}

pub fn floor(r: Rational) -> i128 {
    r.floor().to_integer()
}

pub fn to_f64(r: Rational) -> f64 {
    // Ratio<i128>::to_f64 handles large numerators without going through i64.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"3"`, `"-0.015"`, `"1/100"` or `"2.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || NdError::Format(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(ratio(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(bad());
    }
    let mut denom: i128 = 1;
    if scale >= 0 {
        numer = numer.checked_mul(10i128.pow(scale as u32)).ok_or_else(bad)?;
    } else {
        denom = 10i128.pow(scale.unsigned_abs());
    }
    if neg {
        numer = -numer;
    }
    Ok(ratio(numer, denom))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / a.gcd(&b)).checked_mul(b)
}

pub(crate) fn require_positive(name: &str, r: Rational) -> Result<()> {
    if r <= Rational::zero() {
        return Err(NdError::Domain(format!("{name} must be positive, got {r}")));
    }
    Ok(())
}
