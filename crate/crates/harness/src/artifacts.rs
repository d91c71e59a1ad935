use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{hex, Kind};
use crate::error::{HarnessError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.txt";

/// Writes files under one directory and remembers their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    files: BTreeMap<String, String>,
}

impl ArtifactWriter {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| HarnessError::io(&root, e))?;
        Ok(Self { root, files: BTreeMap::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write `bytes` to the relative path `name`.
    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
        let bytes = bytes.as_ref();
        fs::write(&path, bytes).map_err(|e| HarnessError::io(&path, e))?;
        self.files.insert(name.to_string(), sha256(bytes));
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = to_sorted_json(value)?;
        self.write(name, text + "\n")
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }

    pub fn names(&self) -> Vec<String> {
        self.files.keys().cloned().collect()
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Pretty JSON with every object's keys in sorted order.
pub fn to_sorted_json(value: &impl Serialize) -> Result<String> {
    // serde_json's map is ordered by key, so a round trip through Value sorts.
    let v: Value = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Reproducibility record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: Kind,
    pub config_hash: String,
    pub config_file: String,
    pub seed: u64,
    pub workers: usize,
    pub versions: BTreeMap<String, String>,
    pub wall_time_s: f64,
    /// Relative path → SHA-256 of every emitted file except the manifest.
    pub files: BTreeMap<String, String>,
    pub summary: Value,
    /// Outcome of the run's acceptance check, when it has one.
    pub passed: Option<bool>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = to_sorted_json(self)? + "\n";
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))
    }
}

pub fn versions() -> BTreeMap<String, String> {
    [("loggas", env!("CARGO_PKG_VERSION")), ("format", "1")]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
