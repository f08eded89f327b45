//! Result files. Every file starts with metadata (tool version, the resolved
//! configuration, a timestamp). CSV carries it as `#` lines, the timestamp on
//! a line of its own; JSON carries it under `metadata`.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::exit::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub timestamp: String,
    pub config: &'a RunConfig,
}

impl<'a> Metadata<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Metadata {
            tool: "llr",
            version: VERSION,
            command: config.command.name(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            config,
        }
    }
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn render_csv(meta: &Metadata, table: &Table) -> Result<String, Failure> {
    let config = serde_json::to_string(meta.config).map_err(|e| Failure::usage(e.to_string()))?;
    let mut out = format!(
        "# {} {} {}\n# timestamp: {}\n# config: {config}\n",
        meta.tool, meta.version, meta.command, meta.timestamp
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage(format!("csv: {e}"));
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8_lossy(&body));
    Ok(out)
}

pub fn render_json(meta: &Metadata, result: Value) -> Result<String, Failure> {
    let doc = serde_json::json!({ "metadata": meta, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to standard output.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.2250738585072014e-308, 6.02214076e23, 0.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let digits: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            assert_eq!(digits.len(), 17);
        }
        assert_eq!(format_number(f64::NAN), "NaN");
    }
}
