//! Report serialization: JSON with numbers rounded to 12 significant digits,
//! and plain CSV.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Number, Value};

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Decimal text of `x` after rounding.
pub fn fmt12(x: f64) -> String {
    format!("{}", round12(x))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            // Integers of any width are kept exactly.
            let integral = !n.to_string().contains(['.', 'e', 'E']);
            if !integral {
                if let Some(x) = n.as_f64() {
                    *v = Number::from_f64(round12(x)).map_or(Value::Null, Value::Number);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes `value` with every float rounded.
pub fn to_json<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_value(&mut v);
    v
}

/// Pretty JSON text of `v` with every float rounded.
pub fn render_json(v: &Value) -> String {
    let mut v = v.clone();
    round_value(&mut v);
    let mut text = serde_json::to_string_pretty(&v).expect("values serialize");
    text.push('\n');
    text
}

/// Writes `text` to `out`, or to standard output.
pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_are_rounded_and_integers_kept() {
        let v = to_json(&json!({"a": 0.1 + 0.2, "b": [1.0 / 3.0, 7], "c": u128::MAX, "d": -2.5e-300}));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            format!(r#"{{"a":0.3,"b":[0.333333333333,7],"c":{},"d":-2.5e-300}}"#, u128::MAX)
        );
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(fmt12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(1e-20 / 3.0), "0.00000000000000000000333333333333");
    }
}
