//! Exact rational numbers used for ratios and for the rotor-bore/module pair.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational. i128 keeps cross-multiplication of tooth-count products
/// and user-supplied decimals well clear of overflow.
pub type Rational = Ratio<i128>;

const MAX_FRACTION_DIGITS: usize = 18;

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"79.4"` into an exact
/// rational. Exponent notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(num / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational, String> {
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("`{s}` is not a number"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(format!("`{s}` is not a number"));
    }
    if frac_part.len() > MAX_FRACTION_DIGITS {
        return Err(format!("`{s}` has too many decimal places"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = digits.parse().map_err(|_| format!("`{s}` is out of range"))?;
    let denom = 10i128.pow(frac_part.len() as u32);
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Converts a finite float to the rational of its shortest decimal
/// representation, so `0.6` becomes `3/5` rather than a dyadic approximation.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::InvalidSpec(format!("{x} is not a finite number")));
    }
    parse_rational(&format!("{x}")).map_err(Error::InvalidSpec)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
