//! Tabular results and their CSV / JSON encodings.
//!
//! CSV files start with `# key: value` comment lines (the metadata block),
//! then a header row, then data rows. Missing cells are empty, never `0`.
//! JSON mirrors the same content as
//! `{"schema_version", "kind", "meta", "columns", "rows": [{column: value}]}`.
//! Output is UTF-8 with LF line endings and contains nothing time- or
//! machine-dependent.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::scalar::Backend;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => csv_escape(s),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(format_float(*v)),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Shortest round-trip decimal, switching to scientific notation outside
/// `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<Cell>>>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Table {
            kind: kind.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Option<Cell>>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell value as `f64`, if present and numeric.
    pub fn value(&self, row: usize, column: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(column)?)?.as_ref()? {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# kind: {}", self.kind);
        let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.as_ref().map(Cell::to_csv).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            let parsed = serde_json::from_str::<Value>(v).unwrap_or_else(|_| Value::from(v.clone()));
            meta.insert(k.clone(), parsed);
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(
                        col.clone(),
                        cell.as_ref().map(Cell::to_json).unwrap_or(Value::Null),
                    );
                }
                Value::Object(obj)
            })
            .collect();
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert("kind".into(), Value::from(self.kind.clone()));
        root.insert("meta".into(), Value::Object(meta));
        root.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|c| Value::from(c.clone())).collect()),
        );
        root.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
        s.push('\n');
        s
    }
}

/// How a distance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SepPartition,
    LinfPartition,
    BirthdayBound,
    SepEnum,
    LinfEnum,
    TvEnum,
    SepEmpirical,
    TvEmpirical,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::SepPartition => "sep_partition",
            Method::LinfPartition => "linf_partition",
            Method::BirthdayBound => "birthday_bound",
            Method::SepEnum => "sep_enum",
            Method::LinfEnum => "linf_enum",
            Method::TvEnum => "tv_enum",
            Method::SepEmpirical => "sep_empirical",
            Method::TvEmpirical => "tv_empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCell {
    pub method: Method,
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRow {
    pub k: u32,
    pub cells: Vec<MetricCell>,
}

impl DistanceRow {
    pub fn new(k: u32) -> Self {
        DistanceRow { k, cells: Vec::new() }
    }

    pub fn push(&mut self, method: Method, value: f64, stderr: Option<f64>) {
        self.cells.push(MetricCell {
            method,
            value,
            stderr,
        });
    }

    pub fn get(&self, method: Method) -> Option<f64> {
        self.cells.iter().find(|c| c.method == method).map(|c| c.value)
    }

    pub fn sep(&self) -> Option<f64> {
        self.get(Method::SepPartition).or(self.get(Method::SepEnum))
    }

    pub fn linf(&self) -> Option<f64> {
        self.get(Method::LinfPartition).or(self.get(Method::LinfEnum))
    }

    /// Checks `tv ≤ sep ≤ linf`, `0 ≤ sep ≤ 1`, `linf ≥ 0` and
    /// `sep ≤ birthday bound` on whatever is present, with absolute slack
    /// `tol`. Returns a description of each violation.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let sep = self.sep();
        let linf = self.linf();
        let tv = self.get(Method::TvEnum);
        if let (Some(t), Some(s)) = (tv, sep) {
            if t > s + tol {
                out.push(format!("k={}: tv {t} > sep {s}", self.k));
            }
        }
        if let (Some(s), Some(l)) = (sep, linf) {
            if s > l + tol {
                out.push(format!("k={}: sep {s} > linf {l}", self.k));
            }
        }
        if let Some(s) = sep {
            if !(-tol..=1.0 + tol).contains(&s) {
                out.push(format!("k={}: sep {s} outside [0,1]", self.k));
            }
            if let Some(b) = self.get(Method::BirthdayBound) {
                if s > b + tol {
                    out.push(format!("k={}: sep {s} > birthday bound {b}", self.k));
                }
            }
        }
        if let Some(l) = linf {
            if l < -tol {
                out.push(format!("k={}: linf {l} negative", self.k));
            }
        }
        out
    }
}

/// Per-`k` distances for one `(n, θ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub theta: Vec<f64>,
    pub backend: Backend,
    pub rows: Vec<DistanceRow>,
}

impl DistanceReport {
    /// Long format: `n,theta,k,method,value,stderr`.
    pub fn to_table(&self, theta_label: &str) -> Table {
        let mut t = Table::new("distances", &["n", "theta", "k", "method", "value", "stderr"]);
        t.meta("backend", self.backend);
        for row in &self.rows {
            for cell in &row.cells {
                t.push(vec![
                    Some(self.n.into()),
                    Some(theta_label.into()),
                    Some(row.k.into()),
                    Some(cell.method.as_str().into()),
                    Some(cell.value.into()),
                    cell.stderr.map(Cell::from),
                ]);
            }
        }
        t
    }
}
