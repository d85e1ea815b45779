//! Plain-text rendering of results payloads.
//!
//! Numbers are printed with `Display` of the same `f64` values that the JSON
//! manifest carries, so the two outputs agree exactly.

use std::fmt::Write;

use serde_json::Value;

use super::Command;

pub fn render(command: &Command, results: &Value) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} results", command.name());
    if let (Command::Entangler(_), Value::Array(rows)) = (command, results) {
        table(&mut s, rows);
    }
    walk(&mut s, results, 1);
    s
}

fn cell(v: &Value) -> String {
    scalar(v).unwrap_or_else(|| "?".into())
}

/// One line per reading: isometry verdict, single-input check, locality residual.
fn table(s: &mut String, rows: &[Value]) {
    let _ = writeln!(s, "  {:<10} {:<8} {:<24} {:<12} {:<20} marginal_after", "reading", "isometry", "max_deviation", "single_input", "locality_residual");
    for r in rows {
        let a = &r["audit"];
        let demo = r["demo"].get("marginal_after").map(cell).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "  {:<10} {:<8} {:<24} {:<12} {:<20} {}",
            cell(&a["reading"]),
            cell(&a["gram"]["is_isometry"]),
            cell(&a["gram"]["max_deviation"]),
            cell(&a["single_input_check"]["passes"]),
            cell(&r["locality"]["residual"]),
            demo,
        );
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => x.to_string(),
            _ => n.to_string(),
        }),
        Value::String(t) => Some(t.clone()),
        Value::Object(m) if m.len() == 2 && m.contains_key("re") && m.contains_key("im") => {
            let re = scalar(&m["re"])?;
            let im = scalar(&m["im"])?;
            match (&m["re"], &m["im"]) {
                (Value::Number(_), Value::Number(_)) => Some(format!("{re} + {im}i")),
                _ => None,
            }
        }
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::Bool(_))) => {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn walk(s: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(t) => {
                        let _ = writeln!(s, "{pad}{k}: {t}");
                    }
                    None => {
                        let _ = writeln!(s, "{pad}{k}:");
                        walk(s, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(t) => {
                        let _ = writeln!(s, "{pad}[{i}] {t}");
                    }
                    None => {
                        let _ = writeln!(s, "{pad}[{i}]");
                        walk(s, x, depth + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(s, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
