use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::Scenario;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    /// A sample that could not be computed, written as `nan` / `null`.
    Gap,
    /// Column does not apply to this row.
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Self::Gap, Self::Num)
    }

    fn text(self) -> String {
        match self {
            Self::Num(v) => number(v),
            Self::Gap => "nan".into(),
            Self::Empty => String::new(),
        }
    }

    fn json(self) -> Value {
        match self {
            Self::Num(v) if v.is_finite() => json!(v),
            _ => Value::Null,
        }
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// large magnitudes.
pub fn number(v: f64) -> String {
    if !v.is_finite() {
        return "nan".into();
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) { format!("{v}") } else { format!("{v:e}") }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Ordered `key=value` header block.
#[derive(Default)]
pub struct Metadata(Vec<(String, Value)>);

impl Metadata {
    pub fn for_scenario(command: &str, scenario: &Scenario) -> Self {
        let mut meta = Self::default();
        meta.push("tool", format!("bunching {}", env!("CARGO_PKG_VERSION")));
        meta.push("command", command);
        meta.push("scenario", scenario.name.as_str());
        meta.push("config_hash", scenario.hash(command));
        if let Value::Object(fields) = serde_json::to_value(scenario).expect("scenario serializes") {
            for (k, v) in fields {
                if k != "name" {
                    meta.push(&k, v);
                }
            }
        }
        meta
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        let v = if value.is_finite() { Value::String(number(value)) } else { Value::String("nan".into()) };
        self.0.push((key.to_string(), v));
    }

    fn line(value: &Value) -> String {
        match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

pub fn target(dir: &Path, command: &str, scenario: &str, format: Format) -> PathBuf {
    dir.join(format!("{command}-{scenario}.{}", format.extension()))
}

pub fn write(path: &Path, format: Format, meta: &Metadata, table: &Table) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::io(path, e);
    match format {
        Format::Csv => {
            for (k, v) in &meta.0 {
                writeln!(out, "# {k}={}", Metadata::line(v)).map_err(io)?;
            }
            let mut csv = csv::Writer::from_writer(&mut out);
            let to_io = |e: csv::Error| CliError::io(path, e.into());
            csv.write_record(&table.columns).map_err(to_io)?;
            for row in &table.rows {
                csv.write_record(row.iter().map(|c| c.text())).map_err(to_io)?;
            }
            csv.flush().map_err(io)?;
        }
        Format::Json => {
            let metadata: serde_json::Map<String, Value> = meta.0.iter().cloned().collect();
            let data: Vec<Vec<Value>> = table.rows.iter().map(|r| r.iter().map(|c| c.json()).collect()).collect();
            let doc = json!({ "metadata": metadata, "columns": table.columns, "data": data });
            serde_json::to_writer(&mut out, &doc).map_err(|e| CliError::io(path, e.into()))?;
            writeln!(out).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}
