//! Exact rational magnitudes.
//!
//! Every utility, market value, price and threshold in the crate is a
//! [`Value`], an arbitrary-precision rational kept in lowest terms by
//! `num-rational`. Comparisons are exact; there is no tolerance anywhere.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

pub type Value = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as a rational: {reason}")]
pub struct ParseValueError {
    pub input: String,
    pub reason: &'static str,
}

pub fn int(n: i64) -> Value {
    Value::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Value {
    Value::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Value {
    Value::zero()
}

pub fn one() -> Value {
    Value::one()
}

/// Parses `"a"`, `"-a"`, `"a/b"` (whitespace around the parts is allowed).
pub fn parse_value(s: &str) -> Result<Value, ParseValueError> {
    let err = |reason| ParseValueError {
        input: s.to_owned(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Value::new(num, den))
}

/// Canonical text form: `"7"` for integers, `"3/4"` otherwise.
pub fn format_value(v: &Value) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn is_nonnegative(v: &Value) -> bool {
    !v.is_negative()
}

/// Serde adapter: integers fitting in `i64` are written as JSON numbers, every
/// other value as an `"a/b"` string. Both forms are accepted on input.
pub mod serde_value {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Value, s: S) -> Result<S::Ok, S::Error> {
        if v.is_integer() {
            if let Ok(small) = i64::try_from(v.numer()) {
                return s.serialize_i64(small);
            }
        }
        s.serialize_str(&format_value(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Value, D::Error> {
        d.deserialize_any(ValueVisitor)
    }

    pub(crate) struct ValueVisitor;

    impl Visitor<'_> for ValueVisitor {
        type Value = Value;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a rational string \"a/b\"")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
            Ok(Value::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value, E> {
            Err(E::custom(format!(
                "non-integer number {v} is not exact; write it as a string \"a/b\""
            )))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
            parse_value(v).map_err(E::custom)
        }
    }
}

pub mod serde_value_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    struct Wrapped<'a>(&'a Value);

    impl serde::Serialize for Wrapped<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serde_value::serialize(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(vs: &[Value], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(vs.len()))?;
        for v in vs {
            seq.serialize_element(&Wrapped(v))?;
        }
        seq.end()
    }

    struct Unwrapped(Value);

    impl<'de> serde::Deserialize<'de> for Unwrapped {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            serde_value::deserialize(d).map(Unwrapped)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Value>, D::Error> {
        let raw: Vec<Unwrapped> = serde::Deserialize::deserialize(d)?;
        Ok(raw.into_iter().map(|u| u.0).collect())
    }
}

pub mod serde_opt_value {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Value>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_value::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Value>, D::Error> {
        struct Opt;
        impl<'de> Visitor<'de> for Opt {
            type Value = Option<Value>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("null or a rational")
            }
            fn visit_none<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }
            fn visit_unit<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }
            fn visit_some<D2: Deserializer<'de>>(self, d: D2) -> Result<Self::Value, D2::Error> {
                serde_value::deserialize(d).map(Some)
            }
        }
        d.deserialize_option(Opt)
    }
}
