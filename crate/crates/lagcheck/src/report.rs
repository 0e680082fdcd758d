//! Deterministic report emission.
//!
//! Identical inputs must produce byte-identical output, so the JSON writer
//! is hand-rolled: keys come out sorted (serde_json's map is a BTreeMap),
//! every float is printed with 17 significant digits in scientific
//! notation, and nothing time- or locale-dependent is emitted. CSV follows
//! RFC 4180 with '.' decimals, ',' separators and LF line endings.

use serde_json::{Map, Value};
use std::fmt::Write as _;

/// Top-level report envelope shared by every command.
pub fn report_document(command: &str, inputs: Value, results: Value) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::String("lagcheck/1".into()));
    doc.insert("command".into(), Value::String(command.into()));
    doc.insert("inputs".into(), inputs);
    doc.insert("results".into(), results);
    doc.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    doc.insert("deterministic".into(), Value::Bool(true));
    Value::Object(doc)
}

/// Finite floats become numbers; infinities and NaN become null (JSON has
/// no spelling for them, and unbounded interval ends use this).
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Renders a JSON value with sorted keys and 17-significant-digit floats.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                let _ = write!(out, "{f:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => {
            let _ = write!(out, "{}", Value::String(s.clone()));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                let _ = write!(out, "{}: ", Value::String(key.clone()));
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// One RFC 4180 CSV line: quotes only where the content requires it.
pub fn csv_line(fields: &[String]) -> String {
    let mut line = String::new();
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        if field.contains([',', '"', '\n']) {
            line.push('"');
            line.push_str(&field.replace('"', "\"\""));
            line.push('"');
        } else {
            line.push_str(field);
        }
    }
    line.push('\n');
    line
}

/// Scientific float formatting shared by CSV cells.
pub fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}
