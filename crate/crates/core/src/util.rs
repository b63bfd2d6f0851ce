//! Serialization helpers shared by the report types.

use num_bigint::BigUint;
use serde::Serializer;

/// Big integers travel as decimal strings.
pub fn ser_decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
