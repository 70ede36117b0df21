//! JSON envelopes and CSV tables. Both carry `schema_version` and the
//! checksum of the zero table they were computed from.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use paircorr::zero_table::ZeroTable;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (csv or json)")),
        }
    }
}

pub struct Sink {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timestamp: bool,
}

/// Provenance block for a loaded table.
pub fn source_info(table: &ZeroTable) -> Value {
    let p = table.provenance();
    json!({
        "source": p.source,
        "sha256": p.checksum,
        "zeros": table.len(),
        "t_max": table.t_max(),
        "coverage": table.coverage(),
        "reordered": p.reordered,
    })
}

/// Rows of pre-formatted cells under fixed column names.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), cell_value(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn cell_value(cell: &str) -> Value {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => json!(cell),
    }
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl Sink {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn envelope(&self, command: &str, source: Option<Value>, result: Value) -> Value {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "source": source.unwrap_or(Value::Null),
            "result": result,
        });
        if self.timestamp {
            doc["generated_at"] = json!(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        }
        doc
    }

    /// Writes a JSON document regardless of `format`.
    pub fn json(&self, command: &str, source: Option<Value>, result: Value) -> Result<()> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, &self.envelope(command, source, result))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes a table as CSV (with `schema_version` and `source_sha256`
    /// columns appended) or as a JSON envelope.
    pub fn table(&self, command: &str, source: Option<Value>, table: &Table) -> Result<()> {
        match self.format {
            Format::Json => self.json(command, source, table.to_json()),
            Format::Csv => {
                let sha = source
                    .as_ref()
                    .and_then(|s| s["sha256"].as_str())
                    .unwrap_or("")
                    .to_string();
                let mut w = csv::Writer::from_writer(self.writer()?);
                let mut header: Vec<&str> = table.columns.clone();
                header.extend(["schema_version", "source_sha256"]);
                w.write_record(&header)?;
                let version = SCHEMA_VERSION.to_string();
                for row in &table.rows {
                    let mut record: Vec<&str> = row.iter().map(String::as_str).collect();
                    record.extend([version.as_str(), sha.as_str()]);
                    w.write_record(&record)?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}
