//! Deterministic sweep tables with provenance, emitted as CSV or JSON.
//!
//! Output bytes are a pure function of the command, configuration, and code
//! version: no timestamps, no worker-count dependence. JSON carries 17
//! significant digits (exact round-trip of every f64), CSV 12.

use std::collections::BTreeMap;
use std::io::{self, Write};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// One computed row: values in schema order, or an error message.
#[derive(Debug, Clone)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    /// Ordered column names (without the trailing `error` column).
    pub schema: Vec<String>,
    pub rows: Vec<Row>,
    /// Always populated; keys emitted in sorted order.
    pub provenance: BTreeMap<String, String>,
}

/// `digits` significant decimal digits in scientific notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
}

impl SweepTable {
    pub fn new(schema: &[&str], provenance: BTreeMap<String, String>) -> Self {
        Self {
            schema: schema.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    fn check_arity(&self) {
        for r in &self.rows {
            assert!(
                r.error.is_some() || r.cells.len() == self.schema.len(),
                "row arity {} does not match schema arity {}",
                r.cells.len(),
                self.schema.len()
            );
        }
    }

    pub fn to_csv(&self, out: &mut impl Write) -> io::Result<()> {
        self.check_arity();
        for (k, v) in &self.provenance {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "{},error", self.schema.join(","))?;
        for row in &self.rows {
            match &row.error {
                None => {
                    let cells: Vec<String> = row
                        .cells
                        .iter()
                        .map(|c| match c {
                            Cell::Num(x) => fmt_sig(*x, 12),
                            Cell::Int(i) => i.to_string(),
                            Cell::Text(s) => s.replace(',', ";"),
                        })
                        .collect();
                    writeln!(out, "{},", cells.join(","))?;
                }
                Some(err) => {
                    let blanks = vec![""; self.schema.len()].join(",");
                    writeln!(out, "{blanks},{}", err.replace(',', ";").replace('\n', " "))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self, out: &mut impl Write) -> io::Result<()> {
        self.check_arity();
        writeln!(out, "{{")?;
        writeln!(out, "  \"provenance\": {{")?;
        let n = self.provenance.len();
        for (i, (k, v)) in self.provenance.iter().enumerate() {
            writeln!(
                out,
                "    {}: {}{}",
                json_str(k),
                json_str(v),
                if i + 1 < n { "," } else { "" }
            )?;
        }
        writeln!(out, "  }},")?;
        let cols: Vec<String> = self.schema.iter().map(|s| json_str(s)).collect();
        writeln!(out, "  \"schema\": [{}],", cols.join(", "))?;
        writeln!(out, "  \"rows\": [")?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut fields: Vec<String> = Vec::with_capacity(self.schema.len() + 1);
            match &row.error {
                None => {
                    for (name, cell) in self.schema.iter().zip(&row.cells) {
                        let v = match cell {
                            Cell::Num(x) => fmt_sig(*x, 17),
                            Cell::Int(k) => k.to_string(),
                            Cell::Text(s) => json_str(s),
                        };
                        fields.push(format!("{}: {v}", json_str(name)));
                    }
                    fields.push("\"error\": null".into());
                }
                Some(err) => {
                    for name in &self.schema {
                        fields.push(format!("{}: null", json_str(name)));
                    }
                    fields.push(format!("\"error\": {}", json_str(err)));
                }
            }
            writeln!(
                out,
                "    {{{}}}{}",
                fields.join(", "),
                if i + 1 < self.rows.len() { "," } else { "" }
            )?;
        }
        writeln!(out, "  ]")?;
        writeln!(out, "}}")?;
        Ok(())
    }
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Parses a CSV table emitted by [`SweepTable::to_csv`] back into rows of
/// string cells (provenance comments skipped).
#[cfg(test)]
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next()?.split(',').map(|s| s.to_string()).collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    Some((header, rows))
}
