//! Serde glue writing `BigInt` as a bare JSON number of any size.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Number;

pub fn to_number(v: &BigInt) -> Number {
    Number::from_str(&v.to_string()).expect("decimal integers are valid JSON numbers")
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    to_number(v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let n = Number::deserialize(d)?;
    BigInt::from_str(&n.to_string()).map_err(|_| D::Error::custom(format!("not an integer: {n}")))
}
