//! JSON encodings for exact numbers.
//!
//! Rationals travel as `{"num": "<int>", "den": "<int>"}` with decimal
//! integer strings. Integers travel as decimal strings; plain JSON numbers are
//! accepted on input for hand-written scenario files.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WireInteger(pub Integer);

impl Serialize for WireInteger {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for WireInteger {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = WireInteger;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(WireInteger(Integer::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(WireInteger(Integer::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                v.trim()
                    .parse::<Integer>()
                    .map(WireInteger)
                    .map_err(|e| E::custom(format!("bad integer {v:?}: {e}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WireRational(pub Rational);

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: WireInteger,
    den: WireInteger,
}

impl Serialize for WireRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: WireInteger(self.0.numer().clone()),
            den: WireInteger(self.0.denom().clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WireRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        if r.den.0.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        if r.den.0.is_negative() {
            return Err(de::Error::custom("denominator must be positive"));
        }
        Ok(WireRational(Rational::new(r.num.0, r.den.0)))
    }
}

impl From<Rational> for WireRational {
    fn from(r: Rational) -> Self {
        WireRational(r)
    }
}

impl From<Integer> for WireInteger {
    fn from(n: Integer) -> Self {
        WireInteger(n)
    }
}

pub fn rationals(v: &[Rational]) -> Vec<WireRational> {
    v.iter().cloned().map(WireRational).collect()
}

pub fn integers(v: &[Integer]) -> Vec<WireInteger> {
    v.iter().cloned().map(WireInteger).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn rational_wire_shape() {
        let s = serde_json::to_string(&WireRational(rat(-6, 4))).unwrap();
        assert_eq!(s, r#"{"num":"-3","den":"2"}"#);
        let back: WireRational = serde_json::from_str(r#"{"num":"6","den":"4"}"#).unwrap();
        assert_eq!(back.0, rat(3, 2));
        assert!(serde_json::from_str::<WireRational>(r#"{"num":"1","den":"0"}"#).is_err());
    }

    #[test]
    fn integers_accept_numbers_and_strings() {
        let a: WireInteger = serde_json::from_str("-12").unwrap();
        let b: WireInteger = serde_json::from_str("\"-12\"").unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"-12\"");
    }
}
