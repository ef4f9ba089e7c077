//! CSV and JSON renderings of aggregation results.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::api::{AggregateOutput, QueryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl ExportFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            ExportFormat::Csv => "text/csv; charset=utf-8",
            ExportFormat::Json => "application/json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(QueryError::Malformed(format!("unknown export format {other:?}"))),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Text of one CSV cell. Nulls are empty; strings are written raw.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_csv(columns: &[&str], rows: &[Map<String, Value>]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(columns).expect("write to memory");
    for r in rows {
        w.write_record(columns.iter().map(|c| r.get(*c).map(cell).unwrap_or_default()))
            .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// The rows as a JSON array; the CSV form carries the same rows.
pub fn to_json_rows(rows: &[Map<String, Value>]) -> Vec<u8> {
    serde_json::to_vec(rows).expect("rows serialize")
}

pub fn render(output: &AggregateOutput, format: ExportFormat) -> Vec<u8> {
    let rows = output.rows();
    match format {
        ExportFormat::Csv => to_csv(&output.columns(), &rows),
        ExportFormat::Json => to_json_rows(&rows),
    }
}
