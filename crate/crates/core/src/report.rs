//! Uniform CSV / JSON emission: 12 significant digits, rationals as
//! `num/den`, and a `meta` block on every JSON document.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of a number at 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round12(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// A table plus the metadata describing how it was produced.
#[derive(Clone, Debug)]
pub struct Record {
    pub command: &'static str,
    pub truncation: Map<String, Value>,
    /// Scalar fields reported alongside the table.
    pub fields: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Lines written as `# key=value` before a CSV header.
    pub csv_preamble: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Num(v) => num_value(*v),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

/// JSON number rounded to 12 significant digits; non-finite values become
/// strings.
pub fn num_value(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x))
        .map(Value::Number)
        .unwrap_or_else(|| Value::from(fmt_num(x)))
}

/// Recursively rounds every float in a JSON value.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num_value(n.as_f64().unwrap()),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Serialises any value to JSON with rounded floats.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    round_floats(serde_json::to_value(v).unwrap_or(Value::Null))
}

impl Record {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Record {
            command,
            truncation: Map::new(),
            fields: Map::new(),
            columns,
            rows: Vec::new(),
            csv_preamble: false,
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.truncation.insert(key.into(), to_value(&v));
        self
    }

    pub fn field(mut self, key: &str, v: impl Serialize) -> Self {
        self.fields.insert(key.into(), to_value(&v));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn meta(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        m.insert("schema".into(), Value::from(SCHEMA_VERSION));
        m.insert("truncation_params".into(), Value::Object(self.truncation.clone()));
        Value::Object(m)
    }

    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("meta".into(), self.meta());
        for (k, v) in &self.fields {
            doc.insert(k.clone(), v.clone());
        }
        if !self.columns.is_empty() {
            let rows: Vec<Value> = self
                .rows
                .iter()
                .map(|r| {
                    let mut o = Map::new();
                    for (c, cell) in self.columns.iter().zip(r) {
                        o.insert((*c).into(), cell.json());
                    }
                    Value::Object(o)
                })
                .collect();
            doc.insert("columns".into(), Value::from(self.columns.clone()));
            doc.insert("rows".into(), Value::Array(rows));
        }
        Value::Object(doc)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json()).map_err(|e| Error::Io(e.into()))?;
                writeln!(out)?;
            }
            Format::Csv => {
                if self.csv_preamble {
                    for (k, v) in self.truncation.iter().chain(&self.fields) {
                        writeln!(out, "# {k}={}", plain(v))?;
                    }
                }
                let (columns, rows) = if self.columns.is_empty() {
                    let cols: Vec<&str> = self.fields.keys().map(|k| k.as_str()).collect();
                    let row: Vec<String> = self.fields.values().map(plain).collect();
                    (cols, vec![row])
                } else {
                    (
                        self.columns.clone(),
                        self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect(),
                    )
                };
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&columns).map_err(csv_err)?;
                for r in rows {
                    w.write_record(&r).map_err(csv_err)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => fmt_num(f),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.234_567_890_123_4e-9), "1.23456789012e-9");
        let x = std::f64::consts::PI * 1e7;
        let s = fmt_num(x);
        assert_eq!(s.parse::<f64>().unwrap(), round12(x));
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut r = Record::new("spectrum", vec!["t", "im_s_hat"]).param("q", 3u64);
        r.push(vec![Cell::UInt(0), Cell::Num(0.0)]);
        r.push(vec![Cell::UInt(1), Cell::Num(-1.0 / 3.0)]);
        let mut buf = Vec::new();
        r.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,im_s_hat\n0,0\n1,-0.333333333333\n");
        let j = r.to_json();
        assert_eq!(j["meta"]["command"], "spectrum");
        assert_eq!(j["meta"]["truncation_params"]["q"], 3);
        assert!(j["meta"]["version"].is_string());
    }
}
