//! Report assembly and the JSON, CSV and text renderers.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// What a command produces: `rows` become CSV rows and table lines, every
/// other key of `results` is a summary field.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Value>,
    pub summary: Map<String, Value>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn set(&mut self, key: &str, value: impl serde::Serialize) {
        self.summary.insert(key.to_string(), to_value(value));
    }

    pub fn row(&mut self, value: impl serde::Serialize) {
        self.rows.push(to_value(value));
    }
}

pub fn to_value(value: impl serde::Serialize) -> Value {
    serde_json::to_value(value).expect("report values serialize")
}

/// Rounds every float in `v` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap_or(0.0);
            if x.is_finite() && x != 0.0 {
                let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
                    .parse()
                    .unwrap_or(x);
                if let Some(n) = serde_json::Number::from_f64(rounded) {
                    *num = n;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn report_value(command: &str, config: Value, outcome: &Outcome, seconds: f64) -> Value {
    let mut results = outcome.summary.clone();
    results.insert("rows".into(), Value::Array(outcome.rows.clone()));
    let mut top = Map::new();
    top.insert("command".into(), Value::String(command.into()));
    top.insert("config".into(), config);
    top.insert("results".into(), Value::Object(results));
    top.insert("failures".into(), to_value(&outcome.failures));
    let mut timing = Map::new();
    timing.insert("seconds".into(), to_value(seconds));
    top.insert("timing".into(), Value::Object(timing));
    let mut v = Value::Object(top);
    round_floats(&mut v);
    v
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn columns(rows: &[Value]) -> Vec<String> {
    let mut cols = BTreeSet::new();
    for r in rows {
        if let Value::Object(m) = r {
            cols.extend(m.keys().cloned());
        }
    }
    cols.into_iter().collect()
}

fn field<'a>(row: &'a Value, col: &str) -> &'a Value {
    row.get(col).unwrap_or(&Value::Null)
}

pub fn render_csv(report: &Value) -> Result<Vec<u8>, String> {
    let rows = report["results"]["rows"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let cols = columns(&rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).map_err(|e| e.to_string())?;
    for r in &rows {
        w.write_record(cols.iter().map(|c| cell(field(r, c))))
            .map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", report["command"].as_str().unwrap_or("")));
    if let Some(results) = report["results"].as_object() {
        for (k, v) in results.iter().filter(|(k, _)| *k != "rows") {
            out.push_str(&format!("  {k}: {}\n", cell(v)));
        }
    }
    let rows = report["results"]["rows"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    if !rows.is_empty() {
        let cols = columns(&rows);
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| cols.iter().map(|c| cell(field(r, c))).collect())
            .collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([c.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            format!("  {}\n", padded.join("  ").trim_end())
        };
        out.push('\n');
        out.push_str(&line(&cols));
        for r in &cells {
            out.push_str(&line(r));
        }
    }
    let failures = report["failures"].as_array().cloned().unwrap_or_default();
    out.push_str(&format!("\nfailures: {}\n", failures.len()));
    for f in failures {
        out.push_str(&format!("  {}\n", cell(&f)));
    }
    out
}

pub fn render(report: &Value, format: Format) -> Result<Vec<u8>, String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => render_csv(report)?,
        Format::Text => render_text(report).into_bytes(),
    })
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), String> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| format!("cannot write report: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_twelve_digits() {
        let mut v = json!({"a": 0.1 + 0.2, "b": [1.0 / 3.0], "c": 7});
        round_floats(&mut v);
        assert_eq!(v["a"], json!(0.3));
        assert_eq!(v["b"][0].to_string(), "0.333333333333");
        assert_eq!(v["c"], json!(7));
    }

    #[test]
    fn keys_are_sorted_and_failures_default_empty() {
        let mut o = Outcome::default();
        o.set("zeta", 1);
        o.set("alpha", 2);
        o.row(json!({"x": 1}));
        let r = report_value("params", json!({}), &o, 0.5);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.find("\"command\"").unwrap() < s.find("\"config\"").unwrap());
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.contains("\"failures\":[]"));
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let mut o = Outcome::default();
        for i in 0..5 {
            o.row(json!({"i": i, "v": [i, i]}));
        }
        let r = report_value("x", json!({}), &o, 0.0);
        let csv = String::from_utf8(render_csv(&r).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert!(render_text(&r).contains("failures: 0"));
    }
}
