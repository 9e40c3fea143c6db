//! Deterministic result emission: CSV with 17-significant-digit floats (so
//! results round-trip bit-exactly), or JSON lines. Every data file embeds
//! the fully resolved parameter set; data files carry no timestamps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        }
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One tabular result file: resolved parameters, column names, rows.
pub struct Table {
    pub name: &'static str,
    pub params: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            name,
            params: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Write the table under `dir` in the requested format; returns the path.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        let body = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::JsonLines => self.to_json_lines(),
        };
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({ "table": self.name, "params": params })
        );
        for row in &self.rows {
            let obj: serde_json::Map<String, serde_json::Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| ((*c).to_string(), serde_json::Value::String(v.clone())))
                .collect();
            let _ = writeln!(out, "{}", serde_json::Value::Object(obj));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-7, -4.0e17] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.param("alpha", fmt_float(0.5));
        t.row(vec![fmt_float(1.0), fmt_float(2.0)]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# alpha = "));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert!(lines.next().unwrap().contains(','));
    }
}
