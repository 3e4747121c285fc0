//! JSON output. Non-finite floats are written as the strings `"-inf"`,
//! `"inf"` and `"nan"` instead of `null`; the field helpers below are used
//! through `#[serde(serialize_with = ...)]` on every field that can hold one.

use std::path::Path;

use serde::ser::{SerializeSeq, SerializeTuple};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

fn sentinel(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

struct Flagged(f64);

impl Serialize for Flagged {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(sentinel(self.0))
        }
    }
}

pub fn f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Flagged(*v).serialize(s)
}

pub fn opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => Flagged(*x).serialize(s),
        None => s.serialize_none(),
    }
}

pub fn vec_f64<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        seq.serialize_element(&Flagged(x))?;
    }
    seq.end()
}

pub fn pairs<S: Serializer>(v: &[(f64, f64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    struct Pair(f64, f64);
    impl Serialize for Pair {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(2)?;
            t.serialize_element(&Flagged(self.0))?;
            t.serialize_element(&Flagged(self.1))?;
            t.end()
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &(a, b) in v {
        seq.serialize_element(&Pair(a, b))?;
    }
    seq.end()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Consistency(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        #[serde(serialize_with = "super::f64")]
        a: f64,
        #[serde(serialize_with = "super::vec_f64")]
        b: Vec<f64>,
        #[serde(serialize_with = "super::pairs")]
        c: Vec<(f64, f64)>,
        #[serde(serialize_with = "super::opt_f64")]
        d: Option<f64>,
    }

    #[test]
    fn infinities_become_strings() {
        let r = Row {
            a: f64::NEG_INFINITY,
            b: vec![1.5, f64::INFINITY],
            c: vec![(0.0, f64::NAN)],
            d: Some(f64::NEG_INFINITY),
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        assert_eq!(v["a"], "-inf");
        assert_eq!(v["b"][0], 1.5);
        assert_eq!(v["b"][1], "inf");
        assert_eq!(v["c"][0][1], "nan");
        assert_eq!(v["d"], "-inf");
    }
}
