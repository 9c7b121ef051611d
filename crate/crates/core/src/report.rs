//! Canonical report emission.
//!
//! JSON output has sorted keys and every float printed as `%.12e`, so equal
//! inputs give byte-identical files. CSV output keeps scalar leaves only,
//! keyed by their dotted path.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::tolerance;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Report envelope shared by every command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub tolerances: Value,
    pub outputs: Value,
    pub ok: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Value, outputs: Value, ok: bool) -> Self {
        Self {
            tool: "netwit",
            version: VERSION,
            command: command.into(),
            inputs,
            tolerances: tolerance_table(),
            outputs,
            ok,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))?;
        Ok(match format {
            Format::Json => canonical_json(&v),
            Format::Csv => flatten_csv(&v),
        })
    }
}

pub fn tolerance_table() -> Value {
    let mut m = Map::new();
    for (k, v) in [
        ("structural", tolerance::STRUCTURAL),
        ("reconstruction", tolerance::RECONSTRUCTION),
        ("ppt_floor", tolerance::PPT_FLOOR),
        ("eigen_hermitian", tolerance::EIGEN_HERMITIAN),
        ("verdict_band", tolerance::VERDICT_BAND),
        ("sep_floor", tolerance::SEP_FLOOR),
        ("cyclic_slack", tolerance::CYCLIC_SLACK),
        ("min_success_prob", tolerance::MIN_SUCCESS_PROB),
    ] {
        m.insert(k.to_string(), float_value(v));
    }
    Value::Object(m)
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// `%.12e` as printed by C: mantissa with 12 decimals, signed exponent of at
/// least two digits.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if n.is_f64() {
        out.push_str(&format_float(n.as_f64().expect("float")));
    } else {
        let _ = write!(out, "{n}");
    }
}

fn write_canonical(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let scalar = items.iter().all(|x| !x.is_array() && !x.is_object());
            if scalar {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_canonical(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_canonical(out, x, indent + 2);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_canonical(out, &map[*k], indent + 2);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(&mut out, v, 0);
    out.push('\n');
    out
}

fn collect_scalars(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                collect_scalars(&key, x, out);
            }
        }
        Value::Array(_) => {}
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => {
            let mut s = String::new();
            write_number(&mut s, n);
            out.push((prefix.to_string(), s));
        }
        Value::String(s) => out.push((prefix.to_string(), csv_escape(s))),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header line of dotted keys and one value line, sorted by key.
pub fn flatten_csv(v: &Value) -> String {
    let mut cells = Vec::new();
    collect_scalars("", v, &mut cells);
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    let header: Vec<String> = cells.iter().map(|c| csv_escape(&c.0)).collect();
    let values: Vec<&str> = cells.iter().map(|c| c.1.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

pub fn emit_report(report: &Report, path: &Path, format: Format) -> Result<()> {
    let text = report.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_format_matches_c() {
        assert_eq!(format_float(0.25), "2.500000000000e-01");
        assert_eq!(format_float(1.0), "1.000000000000e+00");
        assert_eq!(format_float(-1234.5), "-1.234500000000e+03");
        assert_eq!(format_float(1e-120), "1.000000000000e-120");
        assert_eq!(format_float(0.0), "0.000000000000e+00");
    }

    #[test]
    fn canonical_json_round_trips_and_sorts() {
        let v = json!({"b": 1, "a": [0.5, 2], "c": {"z": true, "y": null}});
        let s = canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64(), Some(0.5));
        assert_eq!(back["b"], 1);
        assert_eq!(back["c"]["z"], true);
    }

    #[test]
    fn csv_keeps_scalars_only() {
        let v = json!({"b": 1.5, "a": [1, 2], "c": {"d": "x,y"}});
        let csv = flatten_csv(&v);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("b,c.d"));
        assert_eq!(lines.next(), Some("1.500000000000e+00,\"x,y\""));
    }

    #[test]
    fn envelope_carries_version_and_tolerances() {
        let r = Report::new("test", json!({"seed": 3}), json!({"x": 0.1}), true);
        let s = r.render(Format::Json).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["inputs"]["seed"], 3);
        assert!(v["tolerances"]["verdict_band"].as_f64().unwrap() > 0.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&r, &path, Format::Json).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), s);
        assert!(emit_report(&r, &dir.path().join("missing/r.json"), Format::Json).is_err());
    }
}
