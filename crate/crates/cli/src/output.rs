//! Artifact serialization: rounded numbers, schema tag and build identity.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

pub const SCHEMA: u64 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn git_describe() -> &'static str {
    env!("QUNFORGE_GIT_DESCRIBE")
}

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// `{"schema": 1, "git_describe": .., <body fields>}` with every float rounded.
pub fn envelope<T: Serialize>(body: &T) -> Result<Value> {
    let mut out = Map::new();
    out.insert("schema".into(), Value::from(SCHEMA));
    out.insert("git_describe".into(), Value::from(git_describe()));
    match round_value(serde_json::to_value(body)?) {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("body".into(), other);
        }
    }
    Ok(Value::Object(out))
}

pub fn to_json_string<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&envelope(body)?)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(2.0f64.powi(-8)), "0.00390625");
        assert_eq!(fmt_num(123456.7890123456), "123456.789012");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn envelope_rounds_nested_floats() {
        let v = envelope(&serde_json::json!({"a": [0.1 + 0.2], "b": {"c": 2.0 / 3.0}, "n": 3})).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.3);
        assert_eq!(v["b"]["c"].as_f64().unwrap(), 0.666666666667);
        assert_eq!(v["n"], 3);
        assert!(v["git_describe"].is_string());
    }
}
