//! Columnar output in CSV or JSON.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::config::{Format, Mode};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip any f64
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// Result of one run: metadata plus a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: Mode,
    pub metadata: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column as plain floats; text cells are skipped.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let col = self.column(name)?;
        Some(
            col.into_iter()
                .filter_map(|c| match c {
                    Cell::Num(x) => Some(*x),
                    Cell::Int(i) => Some(*i as f64),
                    Cell::Text(_) => None,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut data = Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            data.insert(
                (*name).to_string(),
                Value::Array(self.rows.iter().map(|r| r[i].json()).collect()),
            );
        }
        let doc = json!({
            "mode": self.mode,
            "metadata": self.metadata,
            "columns": self.columns,
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report is valid JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `path`, or to standard output when no path is given.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            mode: Mode::Steady,
            metadata: json!({"n_th": 1.5}),
            columns: vec!["n", "p_n"],
            rows: vec![
                vec![Cell::Int(0), Cell::Num(0.75)],
                vec![Cell::Int(1), Cell::Num(0.25)],
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "n,p_n\n0,7.5000000000000000e-1\n1,2.5000000000000000e-1\n"
        );
        let back: f64 = "1.0000000000000002e0".parse().unwrap();
        assert_eq!(Cell::Num(back).csv(), "1.0000000000000002e0");
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["mode"], "steady");
        assert_eq!(v["data"]["p_n"][1], 0.25);
        assert_eq!(v["metadata"]["n_th"], 1.5);
        assert_eq!(sample().numbers("n").unwrap(), vec![0.0, 1.0]);
    }
}
