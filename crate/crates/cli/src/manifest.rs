//! Reproducibility manifest for run outputs.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::run::RunConfig;

#[derive(Debug, Serialize)]
pub struct FileChecksum {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce the run byte-identically, plus wall time
/// (the one field allowed to differ between identical runs).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub checksums: Vec<FileChecksum>,
    pub n_failed: usize,
    pub wall_time_ms: u128,
}

impl RunManifest {
    pub fn collect(
        cfg: &RunConfig,
        files: &[PathBuf],
        n_failed: usize,
        wall: Duration,
    ) -> anyhow::Result<Self> {
        let mut checksums = Vec::new();
        for path in files {
            checksums.push(FileChecksum {
                file: path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                sha256: sha256_file(path)?,
            });
        }
        Ok(Self {
            tool: "prefprop",
            version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            checksums,
            n_failed,
            wall_time_ms: wall.as_millis(),
        })
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}
