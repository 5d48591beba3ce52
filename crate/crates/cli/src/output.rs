//! CSV and JSON emission.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

/// 17 significant digits, so every double round-trips.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A rectangular numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt_float(x))).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.header.iter().cloned().zip(row.iter().map(|&x| number(x))).collect();
                Value::Object(obj)
            })
            .collect();
        json_bytes(&Value::Array(rows))
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// JSON number, or `null` for non-finite values.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn json_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Two-column `quantity,value` CSV of a flat or nested report. Nested keys are
/// joined with `.`; strings are written verbatim.
pub fn report_csv(report: &Value) -> Result<Vec<u8>, CliError> {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"]).map_err(csv_error)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::Number(x) => out.push((prefix.to_string(), match x.as_f64() {
            Some(f) if x.is_f64() => fmt_float(f),
            _ => x.to_string(),
        })),
        Value::Null => out.push((prefix.to_string(), "nan".into())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn tables() {
        let t = Table {
            header: vec!["k".into(), "delta_e".into()],
            rows: vec![vec![1.0, 0.5]],
        };
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "k,delta_e\n1.0000000000000000e0,5.0000000000000000e-1\n");
    }

    #[test]
    fn nested_report() {
        let v: Value = serde_json::from_str(r#"{"a": 1.5, "b": {"1-2": 2}, "c": "x"}"#).unwrap();
        let csv = String::from_utf8(report_csv(&v).unwrap()).unwrap();
        assert_eq!(csv, "quantity,value\na,1.5000000000000000e0\nb.1-2,2\nc,x\n");
    }
}
