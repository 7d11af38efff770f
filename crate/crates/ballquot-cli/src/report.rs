use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = "ballquot";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wrapper written around every result. There is no timestamp, so identical
/// inputs give byte-identical reports.
#[derive(Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub input_hash: String,
    pub seed: u64,
    pub result: Value,
}

/// Collects the exact bytes that determine a run: the parsed arguments and every input file.
#[derive(Default)]
pub struct InputHasher {
    hasher: Sha256,
}

impl InputHasher {
    pub fn args(&mut self, args: &impl Serialize) {
        let bytes = serde_json::to_vec(args).expect("arguments serialize");
        self.chunk(b"args", &bytes);
    }

    fn chunk(&mut self, tag: &[u8], bytes: &[u8]) {
        self.hasher.update((tag.len() as u64).to_le_bytes());
        self.hasher.update(tag);
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    /// Reads a file, records its contents and returns them.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.chunk(b"file", text.as_bytes());
        Ok(text)
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

pub fn write_output(out: Option<&PathBuf>, envelope: &Envelope<'_>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(envelope).expect("report serializes");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A flat table for optional CSV export.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| CliError::Input(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Input(e.to_string()))
    }
}
