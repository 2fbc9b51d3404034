//! CSV tables and the JSON run manifest.
//!
//! Floats are written in the shortest form that parses back to the same
//! value. Data files carry no timestamps, so identical runs give identical
//! bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, Result};

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

/// A rectangular table with a one-line description of its columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// `columns` pairs each header with its description.
    pub fn new(name: impl Into<String>, columns: &[(&'static str, &'static str)]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn column(&self, header: &str) -> Option<usize> {
        self.columns.iter().position(|(h, _)| *h == header)
    }

    /// Parsed numeric column; empty cells become `None`.
    pub fn values(&self, header: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column(header)?;
        Some(self.rows.iter().map(|r| r[k].parse().ok()).collect())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let doc: Vec<String> = self.columns.iter().map(|(h, d)| format!("{h}: {d}")).collect();
        writeln!(out, "# {}", doc.join("; ")).expect("write to Vec");
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|(h, _)| *h))?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::io("csv buffer", e.into_error()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.to_bytes()?)
            .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub rows: usize,
    pub columns: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub core_version: &'static str,
    pub mode: Mode,
    pub timestamp_unix: u64,
    pub workers: usize,
    pub seed: Option<u64>,
    pub config: ExperimentConfig,
    pub resolved: Value,
    pub artifacts: Vec<ArtifactEntry>,
    pub summary: Value,
    pub findings: Vec<String>,
    pub exit_code: i32,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let file = File::create(&path)
            .map_err(|e| CliError::io(format!("cannot create {}", path.display()), e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io("manifest", e))
    }
}
