use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use puncture_core::Method;

use crate::error::CliError;

/// A number together with the routine and method that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub operation: &'static str,
    pub method: Method,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<&'static str>,
}

impl Tagged {
    /// Non-finite values are reported as `null` with the text in `flag`.
    pub fn new(operation: &'static str, method: Method, value: f64) -> Self {
        Tagged {
            operation,
            method,
            value: value.is_finite().then_some(value),
            flag: non_finite_flag(value),
        }
    }
}

fn non_finite_flag(x: f64) -> Option<&'static str> {
    if x.is_nan() {
        Some("nan")
    } else if x == f64::INFINITY {
        Some("inf")
    } else if x == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

/// One CSV table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Trace {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Trace {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("trace-{}.csv", self.name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    match non_finite_flag(x) {
        Some(flag) => flag.to_string(),
        None => format!("{x:.16e}"),
    }
}

/// Quotes a CSV field when it contains a separator or quote.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub report: Value,
    pub traces: Vec<Trace>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

impl ReportBundle {
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one `trace-*.csv` per trace; returns the paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(1 + self.traces.len());
        let path = dir.join("report.json");
        fs::write(&path, self.json_text())?;
        written.push(path);
        for trace in &self.traces {
            let path = dir.join(trace.file_name());
            fs::write(&path, trace.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 4.0 * std::f64::consts::PI, 1e-300, -2.5e17] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Trace::new("x", &["a", "b"]);
        t.push(vec!["1".into(), csv_text("p, q")]);
        assert_eq!(t.to_csv(), "a,b\n1,\"p, q\"\n");
        assert_eq!(t.file_name(), "trace-x.csv");
    }
}
