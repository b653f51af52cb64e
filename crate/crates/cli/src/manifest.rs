//! Per-run manifest: what ran, with which configuration and seed, and the
//! digest of every file it read or wrote.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{digest_file, write_atomic, FileDigest};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL_NAME: &str = "talbot";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub item: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub started_at: String,
    pub finished_at: String,
    pub seed: u64,
    /// The fully resolved configuration, seed included.
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub failures: Vec<Failure>,
    pub summary: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
        text.push('\n');
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }

    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Re-hashes every listed output under `dir`.
    pub fn verify(&self, dir: &Path) -> Result<(), CliError> {
        for f in &self.outputs {
            let actual = digest_file(&dir.join(&f.path), f.path.clone())?;
            if &actual != f {
                return Err(CliError::Io(format!(
                    "{}: digest mismatch (manifest {}, file {})",
                    f.path, f.sha256, actual.sha256
                )));
            }
        }
        Ok(())
    }
}
