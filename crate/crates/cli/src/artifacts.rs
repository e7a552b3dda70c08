//! Result records and their on-disk forms.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Version of the artifact layout; bumped when a file format changes.
pub const ARTIFACT_VERSION: u32 = 1;

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.json";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// An asserted bound or property failed.
    Fail,
    /// Nothing could be asserted: a vacuous bound or a search that found nothing.
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }

    /// The worse of two statuses; a failure outranks an inconclusive result.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    MonteCarlo,
    Formula,
}

/// A reported number with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
    /// 95% half-width, for Monte Carlo values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

impl Quantity {
    pub fn exact(value: f64) -> Self {
        Quantity {
            value,
            provenance: Provenance::Exact,
            half_width: None,
        }
    }

    pub fn monte_carlo(value: f64, half_width: f64) -> Self {
        Quantity {
            value,
            provenance: Provenance::MonteCarlo,
            half_width: Some(half_width),
        }
    }

    /// A sample statistic without a confidence interval.
    pub fn sampled(value: f64) -> Self {
        Quantity {
            value,
            provenance: Provenance::MonteCarlo,
            half_width: None,
        }
    }

    pub fn formula(value: f64) -> Self {
        Quantity {
            value,
            provenance: Provenance::Formula,
            half_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Float(x) => x.to_string(),
            Cell::Bool(x) => x.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => Value::from(*x),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Bool(x) => Value::Bool(*x),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Per-trial records with a fixed column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
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

    /// `{"columns": [...], "rows": [[...], ...]}`, one row per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"columns\":");
        out.push_str(&serde_json::to_string(&self.columns).expect("strings"));
        out.push_str(",\"rows\":[\n");
        for (i, row) in self.rows.iter().enumerate() {
            let vals: Vec<Value> = row.iter().map(Cell::json).collect();
            let sep = if i + 1 < self.rows.len() { "," } else { "" };
            let _ = writeln!(out, "{}{sep}", Value::Array(vals));
        }
        out.push_str("]}\n");
        out
    }
}

/// What an experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub quantities: Map<String, Value>,
    /// Flags, witnesses and other non-numeric results.
    pub facts: Map<String, Value>,
    pub table: Table,
}

impl Outcome {
    pub fn new(status: Status, table: Table) -> Self {
        Outcome {
            status,
            quantities: Map::new(),
            facts: Map::new(),
            table,
        }
    }

    pub fn quantity(mut self, name: &str, q: Quantity) -> Self {
        self.quantities
            .insert(name.to_string(), serde_json::to_value(q).expect("quantity serialises"));
        self
    }

    pub fn fact(mut self, name: &str, value: impl Serialize) -> Self {
        self.facts
            .insert(name.to_string(), serde_json::to_value(value).expect("fact serialises"));
        self
    }

    pub fn and_status(mut self, status: Status) -> Self {
        self.status = self.status.and(status);
        self
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
