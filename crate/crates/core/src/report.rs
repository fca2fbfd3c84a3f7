//! Deterministic JSON output: keys in sorted order, two-space indentation,
//! every float printed with 17 significant digits.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// `x` with 17 significant digits in exponent form (`-1.7320508075688772e0`);
/// the text parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                // flat arrays of scalars stay on one line
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (k, x) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    write_value(out, x, indent + 1);
                    out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::BubbleParams;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        assert_eq!(format_float(-3f64.sqrt()), "-1.7320508075688772e0");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "null");
        for x in [1e-300, 0.1, 2.0f64.sqrt(), -12345.678, 6.02e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn report_layout_is_stable() {
        let p = BubbleParams {
            sigma: 1.0,
            betas: vec![2.0],
            y0: vec![0.0, 0.0, -1.5],
        };
        let text = to_json_string(&p).unwrap();
        assert_eq!(
            text,
            "{\n  \"betas\": [2.0000000000000000e0],\n  \"sigma\": 1.0000000000000000e0,\n  \"y0\": [0.0000000000000000e0, 0.0000000000000000e0, -1.5000000000000000e0]\n}\n"
        );
        let back: BubbleParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        #[derive(Serialize)]
        struct Mixed {
            count: usize,
            offset: i64,
            nested: Vec<Vec<f64>>,
            none: Option<f64>,
        }
        let text = to_json_string(&Mixed {
            count: 3,
            offset: -2,
            nested: vec![vec![0.5], vec![]],
            none: None,
        })
        .unwrap();
        assert_eq!(
            text,
            "{\n  \"count\": 3,\n  \"nested\": [\n    [5.0000000000000000e-1],\n    []\n  ],\n  \"none\": null,\n  \"offset\": -2\n}\n"
        );
    }
}
