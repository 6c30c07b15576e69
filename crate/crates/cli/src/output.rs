//! CSV tables and JSON sidecars with fixed numeric formatting.

use std::fs;
use std::path::{Path, PathBuf};

use rpdqs_core::experiment::ExperimentConfig;
use rpdqs_core::qsim::PRNG_ALGORITHM;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Nine significant digits, locale-free.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_owned(),
        })
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let p = self.dir.join(name);
        fs::write(&p, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    /// Write `<stem>.csv` and `<stem>.json`. The sidecar carries the resolved
    /// config, its hash, the CSV hash and any command-specific `extra` fields.
    pub fn emit(
        &self,
        stem: &str,
        command: &str,
        config: Option<&ExperimentConfig>,
        table: &Table,
        extra: Map<String, Value>,
    ) -> Result<PathBuf, CliError> {
        let csv = table.to_bytes();
        let csv_path = self.write(&format!("{stem}.csv"), &csv)?;
        let mut meta = Map::new();
        meta.insert("command".into(), json!(command));
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(cfg) = config {
            let cfg_json =
                serde_json::to_value(cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
            meta.insert(
                "config_hash".into(),
                json!(sha256_hex(cfg_json.to_string().as_bytes())),
            );
            meta.insert("config".into(), cfg_json);
            meta.insert("prng".into(), json!(PRNG_ALGORITHM));
        }
        meta.insert("csv".into(), json!(format!("{stem}.csv")));
        meta.insert("content_hash".into(), json!(sha256_hex(&csv)));
        meta.extend(extra);
        let mut body = serde_json::to_string_pretty(&Value::Object(meta))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        body.push('\n');
        self.write(&format!("{stem}.json"), body.as_bytes())?;
        Ok(csv_path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.write(name, text.as_bytes())
    }
}
