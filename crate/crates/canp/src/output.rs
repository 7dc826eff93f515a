//! CSV emission.

use std::fmt::Write as _;

use crate::config::RunConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `#` comment lines written after the provenance line.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Num(x) => x,
                    Cell::Flag(b) => f64::from(u8::from(b)),
                })
                .collect(),
        )
    }

    /// Shortest round-trip formatting; flags as `0`/`1`.
    pub fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut out = format!(
            "# canp {TOOL_VERSION} experiment={} config_sha256={}\n",
            cfg.experiment.name(),
            cfg.hash()
        );
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => {
                        let _ = write!(out, "{x:?}");
                    }
                    Cell::Flag(b) => out.push(if *b { '1' } else { '0' }),
                }
            }
            out.push('\n');
        }
        out
    }
}
