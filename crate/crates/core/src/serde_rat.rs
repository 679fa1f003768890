//! Serialize exact rationals as "a/b" strings.

use serde::Serializer;

use crate::algebra::Rat;

pub fn ser<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
