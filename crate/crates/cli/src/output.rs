//! Provenance manifests and table writers.

use std::fs;
use std::path::{Path, PathBuf};

use qwalk::disorder::Semantics;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance record embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub master_seed: Option<u64>,
    pub semantics: Option<Semantics>,
    pub config: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: &impl Serialize, master_seed: Option<u64>, semantics: Option<Semantics>) -> Self {
        let config = serde_json::to_value(config).expect("config serializes");
        let canonical = serde_json::to_string(&config).expect("value serializes");
        Manifest {
            software: "qwalk".to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            config_sha256: hex(&Sha256::digest(canonical.as_bytes())),
            master_seed,
            semantics,
            config,
        }
    }

    /// `key: value` lines for comment headers.
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("software: {} {}", self.software, self.version),
            format!("command: {}", self.command),
            format!("config_sha256: {}", self.config_sha256),
            format!(
                "master_seed: {}",
                self.master_seed.map_or("none".to_string(), |s| s.to_string())
            ),
            format!("semantics: {}", self.semantics.map_or("none", semantics_name)),
            format!("config: {}", self.config),
        ]
    }
}

pub fn semantics_name(s: Semantics) -> &'static str {
    match s {
        Semantics::BernoulliUniform => "bernoulli-uniform",
        Semantics::ExactPiFraction => "exact-pi-fraction",
    }
}

pub fn parse_semantics(text: &str) -> Option<Semantics> {
    [Semantics::BernoulliUniform, Semantics::ExactPiFraction]
        .into_iter()
        .find(|&s| semantics_name(s) == text)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// A numeric cell; integers stay integers in both CSV and JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    /// Shortest round-trip text; non-finite values as `inf`, `-inf`, `NaN`.
    pub fn text(&self) -> String {
        match *self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) if f.is_finite() => format!("{f:?}"),
            Cell::Float(f) => f.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Cell::Int(i) => s.serialize_i64(i),
            Cell::Float(f) if f.is_finite() => s.serialize_f64(f),
            Cell::Float(f) => s.serialize_str(&f.to_string()),
        }
    }
}

/// Named numeric table written as `<name>.csv` or as a JSON member.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, manifest: &Manifest) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for line in manifest.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
    }
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'static str],
    rows: Rows<'a>,
}

struct Rows<'a>(&'a [Vec<Cell>]);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for row in self.0 {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Collects output files for one run directory.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, file: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_tables_csv(&mut self, tables: &[Table], manifest: &Manifest) -> Result<(), CliError> {
        for t in tables {
            self.write(&format!("{}.csv", t.name), &t.to_csv(manifest)?)?;
        }
        Ok(())
    }

    /// One JSON document holding the manifest and every table.
    pub fn write_tables_json(&mut self, file: &str, tables: &[Table], manifest: &Manifest) -> Result<(), CliError> {
        let mut results = serde_json::Map::new();
        for t in tables {
            let value = serde_json::to_value(JsonTable {
                columns: &t.columns,
                rows: Rows(&t.rows),
            })
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            results.insert(t.name.clone(), value);
        }
        let doc = serde_json::json!({
            "manifest": manifest,
            "results": results,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(file, text.as_bytes())
    }

    pub fn write_json(&mut self, file: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(file, text.as_bytes())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
