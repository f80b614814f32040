//! Exact rational numbers used for every Real-valued constant.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `12`, `-3.25`, `.5`, or `p/q` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    let (neg, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Bit-exact printing: `p` for integers, `p/q` otherwise.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn fmt_exact(r: &Rational) -> String {
    Exact(r).to_string()
}

/// Terminating decimal (`4.5`, `-0.07`) when one exists, otherwise [`fmt_exact`].
pub fn fmt_decimal(r: &Rational) -> String {
    let mut d = r.denom().clone();
    let mut count = |p: u32| {
        let p = BigInt::from(p);
        let mut n = 0usize;
        while (&d % &p).is_zero() {
            d /= &p;
            n += 1;
        }
        n
    };
    let digits = count(2).max(count(5));
    if digits == 0 || !d.is_one() {
        return fmt_exact(r);
    }
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let text = format!("{:0>w$}", (r.abs() * scale).to_integer(), w = digits + 1);
    let (whole, frac) = text.split_at(text.len() - digits);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{frac}")
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Nearest f64, used only for reporting.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
