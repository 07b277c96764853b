use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::config::Format;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}
impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}
impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}
impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x as i64)
    }
}
impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}
impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}
impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}
impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Null, Into::into)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format_sig(*x, 12),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Null => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => (*i).into(),
            // JSON has no inf/nan; non-finite floats become null
            Value::Float(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, Into::into),
            Value::Text(s) => s.clone().into(),
            Value::Bool(b) => (*b).into(),
            Value::Null => serde_json::Value::Null,
        }
    }
}

/// `%.{digits}g`-style formatting: shortest of fixed or exponent notation,
/// trailing zeros dropped.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header {:?}", self.columns);
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one column, `None` if the column does not exist.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub provenance: Provenance,
    pub table: Table,
}

pub fn render(result: &ResultTable, format: Format) -> String {
    match format {
        Format::Csv => render_csv(result),
        Format::Json => render_json(result),
    }
}

fn render_csv(result: &ResultTable) -> String {
    let p = &result.provenance;
    let mut out = String::new();
    writeln!(out, "# tool: {} {}", p.tool, p.version).unwrap();
    writeln!(out, "# experiment: {}", p.experiment).unwrap();
    writeln!(out, "# seed: {}", p.seed).unwrap();
    writeln!(out, "# config: {}", p.config).unwrap();
    for note in &p.notes {
        writeln!(out, "# note: {note}").unwrap();
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&result.table.columns).expect("in-memory write");
    for row in &result.table.rows {
        w.write_record(row.iter().map(Value::csv_cell)).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
    out
}

fn render_json(result: &ResultTable) -> String {
    let rows: Vec<serde_json::Value> = result
        .table
        .rows
        .iter()
        .map(|r| {
            let obj: serde_json::Map<_, _> =
                result.table.columns.iter().cloned().zip(r.iter().map(Value::to_json)).collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "provenance": result.provenance,
        "columns": result.table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn emit_table(result: &ResultTable, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(result, format);
    match path {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
            }
            std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| HarnessError::Io { path: "<stdout>".into(), source })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize) -> ResultTable {
        let mut table = Table::new(["M", "label", "value"]);
        for i in 0..rows {
            table.push(vec![(1usize << i).into(), format!("r,{i}").into(), (1.0 / 3.0 * i as f64).into()]);
        }
        ResultTable {
            provenance: Provenance {
                tool: "istbench".into(),
                version: "0.0.0".into(),
                experiment: "test".into(),
                seed: 5,
                config: json!({"seed": 5}),
                notes: vec!["n".into()],
            },
            table,
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(0.990044880209, 12), "0.990044880209");
        assert_eq!(format_sig(1024.0, 12), "1024");
        assert_eq!(format_sig(0.125, 12), "0.125");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_sig(-2.5e20, 12), "-2.5e+20");
        assert_eq!(format_sig(123456789012.4, 12), "123456789012");
        assert_eq!(format_sig(0.0, 12), "0");
    }

    #[test]
    fn csv_layout() {
        let s = render(&sample(2), Format::Csv);
        let lines: Vec<_> = s.lines().collect();
        assert!(lines[..5].iter().all(|l| l.starts_with('#')));
        assert_eq!(lines[5], "M,label,value");
        assert_eq!(lines[6], "1,\"r,0\",0");
        assert_eq!(lines[7], "2,\"r,1\",0.333333333333");
    }

    #[test]
    fn empty_table_is_header_only() {
        let s = render(&sample(0), Format::Csv);
        assert_eq!(s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["M,label,value"]);
        let j: serde_json::Value = serde_json::from_str(&render(&sample(0), Format::Json)).unwrap();
        assert_eq!(j["rows"], json!([]));
        assert_eq!(j["columns"], json!(["M", "label", "value"]));
    }

    #[test]
    fn json_rows_use_column_names() {
        let j: serde_json::Value = serde_json::from_str(&render(&sample(2), Format::Json)).unwrap();
        assert_eq!(j["rows"][1]["M"], json!(2));
        assert_eq!(j["rows"][1]["label"], json!("r,1"));
        assert_eq!(j["provenance"]["seed"], json!(5));
    }

    #[test]
    #[should_panic]
    fn ragged_rows_rejected() {
        Table::new(["a", "b"]).push(vec![Value::Null]);
    }
}
