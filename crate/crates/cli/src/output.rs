//! In-memory artifacts, the run manifest, and the single write at the end of a
//! successful run.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub const TOOL: &str = "birkdist";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST: &str = "manifest.json";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table whose cells are already formatted.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Files and verdicts produced by one command, held until the run succeeds.
#[derive(Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub verdicts: BTreeMap<String, Value>,
}

impl Artifacts {
    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.files.push((name.to_string(), table.to_bytes()?));
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn verdict(&mut self, key: &str, value: impl Serialize) {
        self.verdicts.insert(key.to_string(), serde_json::to_value(value).expect("verdicts serialize"));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub files: Vec<FileRecord>,
    /// Keyed `command.name`.
    pub verdicts: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: String, seed: u64, artifacts: &Artifacts) -> Self {
        RunManifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config_hash,
            seed,
            files: artifacts
                .files
                .iter()
                .map(|(name, bytes)| FileRecord {
                    name: name.clone(),
                    sha256: hex::encode(Sha256::digest(bytes)),
                    bytes: bytes.len(),
                })
                .collect(),
            verdicts: artifacts.verdicts.iter().map(|(k, v)| (format!("{command}.{k}"), v.clone())).collect(),
        }
    }
}

/// Writes every artifact and then the manifest. Each file goes through a
/// temporary name so a crash never leaves a truncated file behind.
pub fn write_run(dir: &Path, artifacts: &Artifacts, manifest: &RunManifest) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    let mut manifest_bytes = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    manifest_bytes.push(b'\n');
    for (name, bytes) in artifacts.files.iter().map(|(n, b)| (n.as_str(), b)).chain([(MANIFEST, &manifest_bytes)]) {
        let path = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("writing {}: {e}", tmp.display())))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::Io(format!("renaming to {}: {e}", path.display())))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn table_quotes_only_when_needed() {
        let mut t = Table::new(&["p", "count"]);
        t.row(vec!["1 0".into(), "2".into()]);
        t.row(vec!["a,b".into(), "0".into()]);
        assert_eq!(String::from_utf8(t.to_bytes().unwrap()).unwrap(), "p,count\n1 0,2\n\"a,b\",0\n");
    }
}
