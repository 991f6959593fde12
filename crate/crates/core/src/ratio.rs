//! Exact rational helpers.
//!
//! Every threshold in the container procedures is compared in exact
//! arithmetic. Because the quantities being compared are integer counts,
//! a test `count >= r` is the same as `count >= ceil(r)`, and a test
//! `count >= sqrt(r)` is the same as `count >= ceil_sqrt(r)`; the helpers here
//! precompute those integer cut-offs once.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Ratio = BigRational;

pub fn int(n: u64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn big(n: u128) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"1/8"`, `"0.0125"` or `"2.5e-3"` into an exact rational.
pub fn parse(text: &str) -> Result<Ratio> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fractional) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fractional.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{fractional}");
    let mut value = Ratio::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - fractional.len() as i32;
    let ten = Ratio::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// The rational whose decimal expansion is the shortest round-trip
/// representation of `x`, so `0.4_f64` maps to exactly `2/5`.
pub fn from_f64(x: f64) -> Result<Ratio> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    parse(&format!("{x}"))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn to_biguint(n: &BigInt) -> BigUint {
    n.to_biguint().unwrap_or_default()
}

/// Smallest integer `c >= 0` with `c >= r`.
pub fn ceil_u64(r: &Ratio) -> u64 {
    if !r.is_positive() {
        return 0;
    }
    r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Largest integer `c >= 0` with `c <= r`.
pub fn floor_u64(r: &Ratio) -> u64 {
    if !r.is_positive() {
        return 0;
    }
    r.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Smallest integer `c >= 0` with `c * c >= r`.
pub fn ceil_sqrt(r: &Ratio) -> u64 {
    if !r.is_positive() {
        return 0;
    }
    let target = to_biguint(&r.ceil().to_integer());
    let mut c = target.sqrt();
    if &c * &c < target {
        c += 1u32;
    }
    c.to_u64().unwrap_or(u64::MAX)
}

/// Largest integer `t` with `2^t <= r`, for `r > 0`.
pub fn floor_log2(r: &Ratio) -> i64 {
    assert!(r.is_positive(), "floor_log2 of a non-positive value");
    let num = to_biguint(r.numer());
    let den = to_biguint(r.denom());
    let mut t = num.bits() as i64 - den.bits() as i64;
    // 2^t <= num/den  <=>  2^t * den <= num (t >= 0) or den <= num * 2^-t
    let fits = |t: i64| -> bool {
        if t >= 0 {
            (&den << t as usize) <= num
        } else {
            den <= (&num << (-t) as usize)
        }
    };
    while !fits(t) {
        t -= 1;
    }
    while fits(t + 1) {
        t += 1;
    }
    t
}

pub fn is_integer(r: &Ratio) -> bool {
    r.denom().is_one()
}

pub fn sign_of(r: &Ratio) -> Sign {
    r.numer().sign()
}

/// `r` rendered as `a/b` (or `a` when integral).
pub fn display(r: &Ratio) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A probability in `[0, 1]` carried both exactly and as an `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prob {
    exact: Ratio,
    value: f64,
}

impl Prob {
    pub fn new(exact: Ratio) -> Result<Self> {
        if exact.is_negative() || exact > Ratio::one() {
            return Err(Error::PreconditionViolated(format!(
                "probability {} outside [0, 1]",
                display(&exact)
            )));
        }
        let value = to_f64(&exact);
        Ok(Prob { exact, value })
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Prob::new(from_f64(x)?)
    }

    pub fn exact(&self) -> &Ratio {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }
}

impl FromStr for Prob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Prob::new(parse(s)?)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::Number(n) => parse(&n.to_string()),
            serde_json::Value::String(s) => parse(s),
            _ => Err(Error::Parse(format!("expected a probability, got {v}"))),
        };
        parsed.and_then(Prob::new).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing rationals as `"a/b"` strings and accepting numbers too.
pub mod serde_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&display(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ratio, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => parse(&n.to_string()),
            serde_json::Value::String(s) => parse(s),
            _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse("1/8").unwrap(), frac(1, 8));
        assert_eq!(parse("0.0125").unwrap(), frac(1, 80));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("2.5e-3").unwrap(), frac(1, 400));
        assert_eq!(parse("-0.5").unwrap(), frac(-1, 2));
        assert_eq!(parse("1e3").unwrap(), int(1000));
        assert!(parse("abc").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse(".").is_err());
    }

    #[test]
    fn shortest_decimal_from_float() {
        assert_eq!(from_f64(0.4).unwrap(), frac(2, 5));
        assert_eq!(from_f64(0.05).unwrap(), frac(1, 20));
        assert_eq!(from_f64(1e-7).unwrap(), frac(1, 10_000_000));
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_u64(&frac(7, 2)), 4);
        assert_eq!(ceil_u64(&int(4)), 4);
        assert_eq!(ceil_u64(&frac(-3, 2)), 0);
        assert_eq!(floor_u64(&frac(7, 2)), 3);
        assert_eq!(ceil_sqrt(&int(16)), 4);
        assert_eq!(ceil_sqrt(&int(17)), 5);
        assert_eq!(ceil_sqrt(&frac(1, 4)), 1);
        assert_eq!(ceil_sqrt(&Ratio::zero()), 0);
        // sqrt(99/4) ~ 4.97
        assert_eq!(ceil_sqrt(&frac(99, 4)), 5);
        assert_eq!(ceil_sqrt(&frac(100, 4)), 5);
        assert_eq!(ceil_sqrt(&frac(101, 4)), 6);
    }

    #[test]
    fn log2_floor() {
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(floor_log2(&int(9)), 3);
        assert_eq!(floor_log2(&int(7)), 2);
        assert_eq!(floor_log2(&frac(1, 2)), -1);
        assert_eq!(floor_log2(&frac(1, 3)), -2);
        assert_eq!(floor_log2(&frac(2, 1)), 1);
    }

    #[test]
    fn probabilities_are_range_checked() {
        assert!(Prob::new(frac(3, 2)).is_err());
        assert!(Prob::new(frac(-1, 2)).is_err());
        let p: Prob = "1/3".parse().unwrap();
        assert_eq!(p.exact(), &frac(1, 3));
        assert!((p.value() - 1.0 / 3.0).abs() < 1e-15);
    }
}
