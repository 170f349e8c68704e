//! Serialization: fixed-width numbers, CSV tables, JSON documents and run
//! records.
//!
//! Numbers are written with 15 significant digits independent of locale, and
//! every line ends in `\n`, so identical runs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Significant digits used for every number written to disk.
pub const SIGNIFICANT_DIGITS: usize = 15;

/// Formats `x` with 15 significant digits. Plain decimal notation is used for
/// exponents in `[-5, 15)`, scientific otherwise.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    if x == 0.0 {
        return format!("{sign}0.{}", "0".repeat(SIGNIFICANT_DIGITS - 1));
    }
    if !(-5..15).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// `x` rounded to 15 significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x.is_finite() {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// One CSV cell.
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
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => number(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Columnar data with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let map = self.header.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(round_significant(x))
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format_number(x)))
}

/// Serializes `value` with every float rounded to 15 significant digits.
pub fn to_json_value<T: Serialize + ?Sized>(value: &T) -> Result<Value> {
    let raw = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    Ok(round_floats(raw))
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => number(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON text with a trailing newline.
pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializing a Value cannot fail");
    s.push('\n');
    s
}

/// One-row table from the scalar members of a JSON object. Nested values are
/// embedded as compact JSON text.
pub fn object_to_table(value: &Value) -> Table {
    let Value::Object(map) = value else {
        let mut t = Table::new(["value"]);
        t.push(vec![Cell::Text(value.to_string())]);
        return t;
    };
    let mut t = Table::new(map.keys().cloned());
    let row = map
        .values()
        .map(|v| match v {
            Value::Number(n) => n.as_i64().map(Cell::Int).unwrap_or_else(|| Cell::Num(n.as_f64().unwrap_or(f64::NAN))),
            Value::Bool(b) => Cell::Bool(*b),
            Value::String(s) => Cell::Text(s.clone()),
            Value::Null => Cell::Text(String::new()),
            nested => Cell::Text(nested.to_string()),
        })
        .collect();
    t.push(row);
    t
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Provenance of one CLI invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    /// Git blob-style SHA-256 of the canonical command and parameters.
    pub input_hash: String,
    pub outputs: Vec<PathBuf>,
    /// Headline results, already formatted.
    pub summary: BTreeMap<String, String>,
    pub timestamp: String,
}

impl RunRecord {
    pub fn new(command: impl Into<String>, parameters: BTreeMap<String, String>) -> Self {
        let command = command.into();
        let input_hash = input_hash(&command, &parameters);
        RunRecord {
            command,
            parameters,
            input_hash,
            outputs: Vec::new(),
            summary: BTreeMap::new(),
            timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        }
    }

    /// Sidecar path for the record of an output written to `out`.
    pub fn sidecar(out: &Path) -> PathBuf {
        let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".run.json");
        out.with_file_name(name)
    }
}

/// Hash of the canonical input text, framed like a git blob but with SHA-256.
pub fn input_hash(command: &str, parameters: &BTreeMap<String, String>) -> String {
    let mut canonical = format!("command {command}\n");
    for (k, v) in parameters {
        let _ = writeln!(canonical, "{k} {v}");
    }
    blob_hash(canonical.as_bytes())
}

pub fn blob_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}
