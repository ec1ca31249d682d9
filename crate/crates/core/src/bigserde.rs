//! Serde helpers that write big integers as JSON numbers when they fit in 64
//! bits and as decimal strings otherwise. Both forms are accepted on input.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::Deserialize;
use std::fmt;

fn write_int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.trim()
            .parse()
            .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

fn read_int<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    d.deserialize_any(IntVisitor)
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        write_int(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        read_int(d)
    }
}

pub mod uint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        write_int(&BigInt::from(v.clone()), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        read_int(d)?
            .to_biguint()
            .ok_or_else(|| de::Error::custom("expected a non-negative integer"))
    }
}

pub mod int_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "super::int")] BigInt);

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            match x.to_i64() {
                Some(n) => seq.serialize_element(&n)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}
