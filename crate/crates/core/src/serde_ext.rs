//! Serialization helpers for values that may be infinite.

use serde::Serializer;

/// Writes finite reals as numbers and infinities as the strings `"inf"` / `"-inf"`.
pub fn extended_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
