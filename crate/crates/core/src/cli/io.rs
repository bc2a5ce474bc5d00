//! JSON and CSV artifact writers.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::Result;

/// Rewrites every floating-point number with 17 significant digits.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                match n.as_f64() {
                    Some(x) if x.is_finite() => Number::from_str(&format!("{x:.16e}")).map(Value::Number).unwrap_or(Value::Number(n)),
                    _ => Value::Null,
                }
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// Serializes with full precision floats; non-finite values become null.
pub fn to_json_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(normalize_floats(serde_json::to_value(v)?))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

/// Writes a header and rows of floats formatted as `{:.16e}`.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}
