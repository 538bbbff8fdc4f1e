//! Versioned tables shared by every command, with CSV and JSON encodings
//! that round-trip byte for byte.
//!
//! CSV layout:
//!
//! ```text
//! #qcrb-kit v1 command=sweep-w
//! #tolerances analytic=1e-8 fd_step=1e-5 finite_difference=1e-6
//! w,i_h,i_wy,...
//! 0.5,1e-30,null,...
//! ```
//!
//! Missing cells are written as `null`, never left blank.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT_VERSION: &str = "qcrb-kit v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub format: String,
    pub command: String,
    pub tolerances: BTreeMap<String, f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn parse_err(line: usize, msg: impl fmt::Display) -> TableError {
    TableError::Parse {
        line,
        msg: msg.to_string(),
    }
}

/// A float cell; non-finite values become strings so JSON stays valid.
pub fn num(x: f64) -> Value {
    // avoid printing `-0`
    let x = if x == 0.0 { 0.0 } else { x };
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else {
        Value::String(x.to_string())
    }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn cell_to_csv(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_f64(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cell_from_csv(s: &str) -> Value {
    match s {
        "null" => return Value::Null,
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(u) = s.parse::<u64>() {
        return Value::from(u);
    }
    if let Ok(i) = s.parse::<i64>() {
        return Value::from(i);
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() && format_f64(f) == s => num(f),
        _ => Value::String(s.to_string()),
    }
}

impl Table {
    pub fn new(command: &str, columns: &[&str], tolerances: BTreeMap<String, f64>) -> Self {
        Self {
            format: FORMAT_VERSION.into(),
            command: command.into(),
            tolerances,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column `name` as floats, `None` for null or non-numeric cells.
    pub fn floats(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column(name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, TableError> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> Result<String, TableError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String, TableError> {
        let mut out = format!("#{} command={}\n#tolerances", self.format, self.command);
        for (k, v) in &self.tolerances {
            out.push_str(&format!(" {k}={}", format_f64(*v)));
        }
        out.push('\n');
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_to_csv))?;
        }
        let body = w.into_inner().map_err(|e| parse_err(0, e))?;
        out.push_str(&String::from_utf8(body).map_err(|e| parse_err(0, e))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, TableError> {
        let mut lines = text.split_inclusive('\n');
        let first = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let first = first.trim_end_matches('\n');
        let rest = first
            .strip_prefix('#')
            .ok_or_else(|| parse_err(1, "missing `#qcrb-kit` version line"))?;
        let (format, command) = rest
            .rsplit_once(" command=")
            .ok_or_else(|| parse_err(1, "missing command"))?;
        if format != FORMAT_VERSION {
            return Err(parse_err(1, format!("unsupported format `{format}`")));
        }
        let second = lines
            .next()
            .ok_or_else(|| parse_err(2, "missing tolerance line"))?
            .trim_end_matches('\n');
        let tol_text = second
            .strip_prefix("#tolerances")
            .ok_or_else(|| parse_err(2, "missing `#tolerances` line"))?;
        let mut tolerances = BTreeMap::new();
        for item in tol_text.split_whitespace() {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| parse_err(2, format!("bad tolerance `{item}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|e| parse_err(2, format!("`{item}`: {e}")))?;
            tolerances.insert(k.to_string(), v);
        }
        let body: String = lines.collect();
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(body.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != columns.len() {
                return Err(parse_err(k + 4, "wrong number of cells"));
            }
            rows.push(rec.iter().map(cell_from_csv).collect());
        }
        Ok(Self {
            format: format.to_string(),
            command: command.to_string(),
            tolerances,
            columns,
            rows,
        })
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut tols = BTreeMap::new();
        tols.insert("analytic".into(), 1e-8);
        tols.insert("fd_step".into(), 1e-5);
        let mut t = Table::new("compute", &["theta", "i_h", "note", "ok", "n"], tols);
        t.push(vec![
            num(0.3),
            num(4.000000000000001),
            Value::Null,
            Value::Bool(true),
            Value::from(3u64),
        ]);
        t.push(vec![
            num(-1.25e-17),
            num(f64::INFINITY),
            Value::String("a,b".into()),
            Value::Bool(false),
            Value::from(0u64),
        ]);
        t
    }

    #[test]
    fn csv_round_trip() {
        let csv = sample().to_csv().unwrap();
        assert!(csv.starts_with("#qcrb-kit v1 command=compute\n"));
        assert!(csv.contains(",null,"));
        let back = Table::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv().unwrap(), csv);
        assert_eq!(back, sample());
    }

    #[test]
    fn json_round_trip() {
        let json = sample().to_json().unwrap();
        let back = Table::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
        assert_eq!(Table::parse(&json).unwrap(), back);
    }

    #[test]
    fn rejects_unversioned_csv() {
        assert!(Table::from_csv("theta\n0.1\n").is_err());
        assert!(Table::from_csv("#qcrb-kit v9 command=x\n#tolerances\na\n").is_err());
    }
}
