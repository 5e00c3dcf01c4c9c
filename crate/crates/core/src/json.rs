//! JSON conventions shared by all reports: complex numbers as `[re, im]`
//! pairs, and a canonical writer (sorted keys, floats at 17 significant
//! digits) so identical inputs produce byte-identical reports.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use std::io::Write;

/// Serde adapter: `Complex64` <-> `[re, im]`.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde adapter: `Option<Complex64>` <-> `[re, im] | null`.
pub mod complex_pair_opt {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Option<Complex64>, ser: S) -> Result<S::Ok, S::Error> {
        match c {
            Some(c) => complex_pair::serialize(c, ser),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Complex64>, D::Error> {
        let v = Option::<[f64; 2]>::deserialize(de)?;
        Ok(v.map(|[re, im]| Complex64::new(re, im)))
    }
}

/// Serde adapter: `Vec<Complex64>` <-> `[[re, im], ...]`.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Format an `f64` with 17 significant digits in exponent form.
fn write_float<W: Write>(out: &mut W, v: f64) -> std::io::Result<()> {
    // 16 digits after the point = 17 significant digits; round-trips exactly.
    write!(out, "{v:.16e}")
}

fn write_canonical<W: Write>(out: &mut W, v: &Value) -> std::io::Result<()> {
    match v {
        Value::Null => write!(out, "null"),
        Value::Bool(b) => write!(out, "{b}"),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}")
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}")
            } else {
                write_float(out, n.as_f64().expect("number is i64, u64, or f64"))
            }
        }
        Value::String(s) => {
            let encoded = serde_json::to_string(s).expect("string encodes");
            write!(out, "{encoded}")
        }
        Value::Array(items) => {
            write!(out, "[")?;
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    write!(out, ",")?;
                }
                write_canonical(out, item)?;
            }
            write!(out, "]")
        }
        // serde_json's default Map is BTreeMap-backed, so keys are sorted.
        Value::Object(map) => {
            write!(out, "{{")?;
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    write!(out, ",")?;
                }
                let encoded = serde_json::to_string(key).expect("string encodes");
                write!(out, "{encoded}:")?;
                write_canonical(out, item)?;
            }
            write!(out, "}}")
        }
    }
}

/// Render any serializable report in the canonical byte-stable form.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> crate::error::Result<String> {
    let v = serde_json::to_value(value).map_err(|e| crate::error::CoreError::Json(e.to_string()))?;
    let mut buf = Vec::new();
    write_canonical(&mut buf, &v).map_err(|e| crate::error::CoreError::Json(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("writer produces utf-8"))
}

/// Parse a JSON string, mapping errors into [`crate::error::CoreError::Json`].
pub fn from_json_str<'a, T: Deserialize<'a>>(s: &'a str) -> crate::error::Result<T> {
    serde_json::from_str(s).map_err(|e| crate::error::CoreError::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_floats_have_17_significant_digits() {
        let s = to_canonical_json(&json!({"pi": std::f64::consts::PI})).unwrap();
        assert_eq!(s, r#"{"pi":3.1415926535897931e0}"#);
    }

    #[test]
    fn canonical_objects_sort_keys() {
        let s = to_canonical_json(&json!({"b": 1, "a": 2})).unwrap();
        assert_eq!(s, r#"{"a":2,"b":1}"#);
    }

    #[test]
    fn canonical_output_round_trips() {
        let v = json!({"x": [1.5, -2.25], "n": 7, "s": "a\"b"});
        let s = to_canonical_json(&v).unwrap();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
