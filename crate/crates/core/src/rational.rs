//! Exact rational helpers: canonical `p/q` strings and small conversions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical form: `"2"` for integers, `"p/q"` otherwise.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerator or denominator; fall back to a ratio of logs
        let s = if x.is_negative() { -1.0 } else { 1.0 };
        let ln = big_ln(&x.numer().abs()) - big_ln(x.denom());
        s * ln.exp()
    })
}

fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn sum(xs: &[Q]) -> Q {
    xs.iter().fold(Q::zero(), |acc, x| acc + x)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn format_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = RawQ::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    /// Accepts either a JSON integer or a string.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawQ {
        Int(i64),
        Str(String),
    }

    impl RawQ {
        pub(crate) fn into_q(self) -> Result<Q> {
            match self {
                RawQ::Int(i) => Ok(q(i)),
                RawQ::Str(s) => parse_q(&s),
            }
        }
    }
}

pub mod serde_qvec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw = Vec::<serde_q::RawQ>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_q().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        assert_eq!(format_q(&qr(4, 2)), "2");
        assert_eq!(format_q(&qr(-3, 6)), "-1/2");
        assert_eq!(parse_q(" 6/4 ").unwrap(), qr(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn huge_to_f64() {
        let big = Q::new(BigInt::from(10).pow(400), BigInt::from(10).pow(398));
        assert!((to_f64(&big) - 100.0).abs() < 1e-9);
    }
}
