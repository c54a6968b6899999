//! Certificates and plot-ready tables.
//!
//! A [`Certificate`] is the JSON record of one verification suite:
//! `{suite, delta, checks: [{name, lhs, rhs, margin, pass}], truncation, timing_ms}`.
//! A failed check is its own counterexample record.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One inequality evaluated numerically. `margin > 0` (or `≥ 0` for
/// non-strict checks) means the inequality holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_pair: Option<[u64; 2]>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `lhs > rhs`
    pub fn exceeds(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        Self::raw(name, lhs, rhs, margin, margin > 0.0)
    }

    /// `lhs ≥ rhs`
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        Self::raw(name, lhs, rhs, margin, margin >= 0.0)
    }

    /// `lhs ≤ rhs`
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self::raw(name, lhs, rhs, margin, margin >= 0.0)
    }

    /// `lhs < rhs`
    pub fn below(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self::raw(name, lhs, rhs, margin, margin > 0.0)
    }

    /// `|value − target| ≤ tol`, reported as `lhs = |value − target|`, `rhs = tol`.
    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::at_most(name, (value - target).abs(), tol)
    }

    /// A yes/no fact, encoded as `lhs ∈ {0, 1}` against `rhs = 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let lhs = if ok { 1.0 } else { 0.0 };
        Self::raw(name, lhs, 1.0, lhs - 1.0, ok)
    }

    pub fn raw(name: impl Into<String>, lhs: f64, rhs: f64, margin: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            index_pair: None,
            lhs,
            rhs,
            margin,
            pass,
        }
    }

    pub fn with_pair(mut self, p: u64, q: u64) -> Self {
        self.index_pair = Some([p, q]);
        self
    }

    /// Replaces the margin by a more accurately evaluated one, keeping the
    /// strictness of the original comparison.
    pub fn with_margin(mut self, margin: f64, strict: bool) -> Self {
        self.margin = margin;
        self.pass = if strict { margin > 0.0 } else { margin >= 0.0 };
        self
    }
}

/// Result of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub suite: String,
    pub delta: f64,
    pub checks: Vec<CheckRecord>,
    pub truncation: BTreeMap<String, u64>,
    pub timing_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(suite: impl Into<String>, delta: f64) -> Self {
        Self {
            suite: suite.into(),
            delta,
            checks: Vec::new(),
            truncation: BTreeMap::new(),
            timing_ms: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckRecord>) {
        self.checks.extend(checks);
    }

    pub fn truncate_at(&mut self, key: &str, value: u64) {
        self.truncation.insert(key.to_owned(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Absorbs another certificate's checks and truncation parameters.
    pub fn merge(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
        self.truncation.extend(other.truncation);
        self.notes.extend(other.notes);
        self.timing_ms += other.timing_ms;
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Smallest margin among checks whose name starts with `prefix`.
    pub fn min_margin(&self, prefix: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.margin)
            .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Fixed CSV rendering of a float: 17 significant digits, which round-trips
/// every binary64 value.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

/// A cell of a [`Table`].
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// A named CSV table with deterministic formatting.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| (*h).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
