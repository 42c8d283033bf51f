//! Exact rational helpers shared by every module.
//!
//! All coefficients, error bounds and CLI parameters are [`Rational`]s. Floats
//! only enter through the LP backend and are converted back with
//! [`snap_f64`] or [`dyadic_f64`] before anything is verified.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    // Huge numerators and denominators overflow a direct conversion, so scale
    // both down by the same power of two first.
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// Parses `a/b`, an integer, or a decimal such as `-0.125` or `1e-3`, exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = |msg: &str| Error::parse(format!("rational {s:?}"), msg.to_string());
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad("bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad("no digits"));
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("unexpected character"));
    }
    let all: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad("bad digits"))?;
    let mut value = Rational::new(all, BigInt::from(10u32).pow(frac.len() as u32 + 1));
    let ten = Rational::from_integer(BigInt::from(10u32));
    if exponent >= 0 {
        value *= pow(&ten, exponent as u32);
    } else {
        value /= pow(&ten, exponent.unsigned_abs());
    }
    Ok(if negative { -value } else { value })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Best rational approximation of `v` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn snap_f64(v: f64, max_den: u64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    let negative = v < 0.0;
    let x = v.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as u128 {
            // largest semiconvergent that still fits
            let k = (max_den as u128 - q0) / q1.max(1);
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            if qs > 0 && (x - ps as f64 / qs as f64).abs() < (x - p1 as f64 / q1.max(1) as f64).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rem - a as f64;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -r } else { r })
}

/// Rounds `v` to the nearest multiple of `2^-bits`.
pub fn dyadic_f64(v: f64, bits: u32) -> Rational {
    let scaled = (v * 2f64.powi(bits as i32)).round();
    Rational::new(
        BigInt::from(scaled as i128),
        BigInt::one() << bits as usize,
    )
}

/// Snaps `v` to a small-denominator rational when one lies within `tol`,
/// otherwise rounds to a fine dyadic.
pub fn rationalize(v: f64, tol: f64) -> Rational {
    match snap_f64(v, 4096) {
        Some(r) if (to_f64(&r) - v).abs() <= tol => r,
        _ => dyadic_f64(v, 48),
    }
}

pub fn ceil_to_u64(r: &Rational) -> u64 {
    r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

pub fn floor_to_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Serializes a rational as its `num/den` string.
pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn serialize_opt<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}
