//! Run manifests written next to every set of outputs.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> anyhow::Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) })
    }
}

/// Everything needed to repeat a run. Two runs whose manifests agree on all
/// fields except `timestamp` produce byte-identical outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, seed: u64) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn add_outputs(&mut self, paths: &[PathBuf]) -> anyhow::Result<()> {
        for p in paths {
            self.outputs.push(FileDigest::of(p)?);
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
