//! Serialization of reports: JSON with floats at fixed precision, and CSV
//! with nested fields flattened to dotted column names.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Significant digits kept for floating-point values.
pub const FLOAT_DIGITS: usize = 12;

/// Round every float in `v` to [`FLOAT_DIGITS`] significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("f64 number");
            let r: f64 = format!("{:.*e}", FLOAT_DIGITS - 1, f)
                .parse()
                .expect("formatted float parses");
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Serialize and round.
pub fn to_value<T: Serialize>(report: &T) -> Result<Value> {
    serde_json::to_value(report)
        .map(round_floats)
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON text with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let v = to_value(report)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Flatten nested objects and arrays into `(dotted.key, scalar text)` pairs
/// in document order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(o) => o.iter().for_each(|(k, v)| go(&key(k), v, out)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| go(&key(&i.to_string()), v, out)),
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

/// Two-line CSV: header of dotted names, then the values.
pub fn to_csv<T: Serialize>(report: &T) -> Result<String> {
    let flat = flatten(&to_value(report)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(flat.iter().map(|(k, _)| k)).map_err(io)?;
    w.write_record(flat.iter().map(|(_, v)| v)).map_err(io)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Object with keys in insertion order, for assembling reports.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
