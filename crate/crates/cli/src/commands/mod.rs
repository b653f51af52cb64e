//! The three subcommands and the run bookkeeping they share.

mod oracle_check;
mod quench;
mod simulate;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use sha2::{Digest, Sha256};
use talbot_core::rng;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::manifest::{Failure, RunManifest, TOOL_NAME};
use crate::output::{default_out_dir, digest_file, FileDigest, OutputDir};

pub use oracle_check::{oracle_check, CheckResult, OracleReport};
pub use quench::{quench, QuenchReport};
pub use simulate::{simulate, SimulateReport};

pub const RUN_CONFIG_FILE: &str = "run-config.toml";

/// Command-line overrides common to every subcommand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
}

impl Invocation {
    pub fn with_config(path: impl Into<PathBuf>) -> Self {
        Self {
            config: Some(path.into()),
            ..Self::default()
        }
    }

    pub fn out(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out = Some(dir.into());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Seed from the wall clock and process id, for runs that did not fix one.
fn fresh_seed() -> u64 {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let digest = Sha256::new()
        .chain_update(now.to_le_bytes())
        .chain_update(std::process::id().to_le_bytes())
        .finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Independent sub-seed `k` of the run seed.
pub(crate) fn subseed(seed: u64, k: u64) -> u64 {
    rng::stream(seed, k).random()
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// A run whose configuration is loaded and whose output directory exists.
pub(crate) struct Run {
    pub command: &'static str,
    pub config: RunConfig,
    pub seed: u64,
    pub out: OutputDir,
    inputs: Vec<FileDigest>,
    started_at: String,
    pub failures: Vec<Failure>,
    pub summary: BTreeMap<String, serde_json::Value>,
}

impl Run {
    pub fn start(command: &'static str, inv: &Invocation) -> Result<Self, CliError> {
        let started_at = timestamp();
        let (mut config, inputs) = match &inv.config {
            Some(path) => {
                let config = RunConfig::load(path)?;
                (config, vec![digest_file(path, path.display().to_string())?])
            }
            None => (RunConfig::default(), Vec::new()),
        };
        let seed = inv.seed.or(config.output.seed).unwrap_or_else(fresh_seed);
        config.output.seed = Some(seed);
        if let Some(format) = inv.format {
            config.output.format = format;
        }
        let dir = inv
            .out
            .clone()
            .or_else(|| config.output.dir.clone())
            .unwrap_or_else(default_out_dir);
        config.output.dir = Some(dir.clone());
        Ok(Self {
            command,
            config,
            seed,
            out: OutputDir::create(dir)?,
            inputs,
            started_at,
            failures: Vec::new(),
            summary: BTreeMap::new(),
        })
    }

    pub fn svg(&self) -> bool {
        self.config.output.format.svg()
    }

    pub fn fail(&mut self, item: impl Into<String>, error: impl ToString) {
        self.failures.push(Failure {
            item: item.into(),
            error: error.to_string(),
        });
    }

    pub fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }

    /// Writes the resolved configuration and the manifest.
    pub fn finish(mut self) -> Result<RunOutput, CliError> {
        let toml = self.config.to_toml();
        self.out.write(RUN_CONFIG_FILE, toml.as_bytes())?;
        let manifest = RunManifest {
            tool: TOOL_NAME.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: self.command.to_owned(),
            started_at: self.started_at,
            finished_at: timestamp(),
            seed: self.seed,
            config: self.config,
            inputs: self.inputs,
            outputs: self.out.files().to_vec(),
            failures: self.failures,
            summary: self.summary,
        };
        manifest.write(self.out.root())?;
        Ok(RunOutput {
            dir: self.out.root().to_path_buf(),
            manifest,
        })
    }
}

/// Where a finished run wrote its files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

/// Finite JSON number, or `null` for non-finite values.
pub(crate) fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}
