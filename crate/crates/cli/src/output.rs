use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

/// `x` rounded to 10 significant digits.
pub fn sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(sig10(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Serializes `value` with every float cut to 10 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    Ok(v)
}

pub fn print_json(value: &Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_digits() {
        assert_eq!(sig10(1.0 / 3.0), 0.3333333333);
        assert_eq!(sig10(2.0 / 3.0), 0.6666666667);
        assert_eq!(sig10(123456789012.0), 123456789000.0);
        assert_eq!(sig10(0.0), 0.0);
        let v = to_json(&serde_json::json!({"a": [1.0 / 7.0, 3], "b": {"c": 1e-20 / 3.0}})).unwrap();
        assert_eq!(v.to_string(), r#"{"a":[0.1428571429,3],"b":{"c":3.333333333e-21}}"#);
    }
}
