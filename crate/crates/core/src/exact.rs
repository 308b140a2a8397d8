//! Exact rational helpers: construction, perfect-square extraction, decimal
//! approximation of square roots, and the `num/den` text encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn half() -> Rational {
    rat(1, 2)
}

pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && x <= &Rational::one()
}

/// Exact square root of a rational, if it is the square of a rational.
///
/// The value is reduced to lowest terms first; it is a perfect square iff
/// both numerator and denominator are perfect integer squares.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (numer, denom) = (x.numer(), x.denom());
    let rn = numer.sqrt();
    let rd = denom.sqrt();
    if &(&rn * &rn) == numer && &(&rd * &rd) == denom {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Rational approximation of `sqrt(x)` for `x >= 0` carrying at least
/// `digits` significant decimal digits. Returns the exact root when one exists.
pub fn sqrt_approx(x: &Rational, digits: u32) -> Rational {
    assert!(!x.is_negative(), "sqrt_approx of a negative value");
    if let Some(root) = exact_sqrt(x) {
        return root;
    }
    // sqrt(n/d) = sqrt(n*d)/d; scale by 10^k before the integer root.
    let denom_digits = x.denom().to_string().len() as u32;
    let numer_digits = x.numer().to_string().len() as u32;
    let k = digits + denom_digits + numer_digits;
    let scale = BigInt::from(10u32).pow(k);
    let radicand = x.numer() * x.denom() * &scale * &scale;
    Rational::new(radicand.sqrt(), x.denom() * scale)
}

/// Round to `digits` significant decimal digits (keeps approximations of
/// irrational quantities at a bounded size).
pub fn round_significant(x: &Rational, digits: u32) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let shift = digits as i64 - 1 - decimal_exponent(&x.abs());
    let ten = BigInt::from(10u32);
    if shift >= 0 {
        let scale = ten.pow(shift as u32);
        Rational::new((x * Rational::from_integer(scale.clone())).round().to_integer(), scale)
    } else {
        let scale = Rational::from_integer(ten.pow((-shift) as u32));
        (x / &scale).round() * scale
    }
}

/// `e` such that `10^e <= m < 10^(e+1)` for `m > 0`.
fn decimal_exponent(m: &Rational) -> i64 {
    let mut e = m.numer().to_string().len() as i64 - m.denom().to_string().len() as i64;
    if m < &pow10(e) {
        e -= 1;
    }
    e
}

fn pow10(e: i64) -> Rational {
    let p = Rational::from_integer(BigInt::from(10u32).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Round half away from zero.
pub fn round_half_away(x: &Rational) -> BigInt {
    x.round().to_integer()
}

/// Format as `num/den`, or `num` for integers.
pub fn format(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `num/den`, an integer, or a plain decimal literal such as `0.125`,
/// exactly.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| serde::de::Error::custom(format!("invalid rational {text:?}")))
    }
}

pub mod serde_opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse(&t).ok_or_else(|| serde::de::Error::custom(format!("invalid rational {t:?}"))))
            .transpose()
    }
}
