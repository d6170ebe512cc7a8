//! JSON encodings for wide integers: naturals as decimal strings, and counts
//! as plain numbers only while they stay exact in an IEEE double.

use num_bigint::BigUint;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest integer every JSON consumer can hold exactly.
const EXACT_IN_DOUBLE: u64 = 1 << 53;

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrString {
    Number(u64),
    String(String),
}

fn parse_decimal<E: serde::de::Error>(s: &str) -> Result<BigUint, E> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(E::custom(format!("expected a decimal integer, got {s:?}")));
    }
    s.parse().map_err(E::custom)
}

pub mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        v.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        parse_decimal(&String::deserialize(d)?)
    }
}

pub mod opt_decimal {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(BigUint::to_string).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_decimal(&s))
            .transpose()
    }
}

pub mod count {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        if *v <= EXACT_IN_DOUBLE {
            v.serialize(s)
        } else {
            v.to_string().serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match NumberOrString::deserialize(d)? {
            NumberOrString::Number(n) => Ok(n),
            NumberOrString::String(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

pub mod opt_wide_count {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        match v {
            None => s.serialize_none(),
            Some(v) => match v.to_u64().filter(|x| *x <= EXACT_IN_DOUBLE) {
                Some(small) => s.serialize_some(&small),
                None => s.serialize_some(&v.to_string()),
            },
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Ok(match Option::<NumberOrString>::deserialize(d)? {
            None => None,
            Some(NumberOrString::Number(n)) => Some(BigUint::from(n)),
            Some(NumberOrString::String(s)) => Some(parse_decimal(&s)?),
        })
    }
}

pub mod u32_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u32, s: S) -> Result<S::Ok, S::Error> {
        v.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

pub mod u64_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        v.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
