//! JSON encoding of arbitrary-precision integers as plain numbers.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::Serializer;

fn number(text: &str) -> serde_json::Number {
    serde_json::Number::from_str(text).expect("decimal integer is a valid JSON number")
}

pub fn int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&number(&v.to_string()), s)
}

pub fn uint_seq<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| number(&x.to_string())))
}
