//! CSV tables with a comment header.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::config::Settings;

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Scientific notation with 10 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.9e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Header, notes, column names and rows.
    pub fn render(&self, command: &str, settings: &Settings) -> String {
        let mut s = format!(
            "# ou-x {}\n# command: {command}\n",
            env!("CARGO_PKG_VERSION")
        );
        for (k, v) in settings.iter() {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        for n in &self.notes {
            s.push_str(&format!("# {n}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    /// Writes to `out`, or stdout when it is absent or "-".
    pub fn emit(&self, command: &str, settings: &Settings, out: Option<&str>) -> Result<()> {
        let text = self.render(command, settings);
        match out {
            None | Some("-") => {
                let mut o = std::io::stdout().lock();
                o.write_all(text.as_bytes())
                    .map_err(|e| Error::Config(format!("stdout: {e}")))
            }
            Some(p) => {
                std::fs::write(Path::new(p), text).map_err(|e| Error::Config(format!("{p}: {e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt_num(0.152287524), "1.522875240e-1");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(-1.0 / 3.0), "-3.333333333e-1");
    }

    #[test]
    fn header_then_rows() {
        let mut t = Table::new(&["method", "prob"]);
        t.push(vec!["quadrature".into(), 0.5.into()]);
        t.note("verdict = transformation");
        let s = t.render("joint", &Settings::default());
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# ou-x "));
        assert_eq!(lines[2], "# verdict = transformation");
        assert_eq!(lines[3], "method,prob");
        assert_eq!(lines[4], "quadrature,5.000000000e-1");
    }
}
