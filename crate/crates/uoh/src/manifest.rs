//! Output directory bookkeeping and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Digest256 {
    pub name: String,
    pub sha256: String,
}

/// Everything needed to tell whether two runs should agree. Paths are
/// recorded by file name only and nothing time-dependent is stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub config_sha256: Option<String>,
    pub inputs: Vec<Digest256>,
    pub seed: Option<u64>,
    pub versions: serde_json::Value,
    pub artifacts: Vec<Digest256>,
}

/// Writes artifacts into one directory and remembers their digests.
pub struct OutDir {
    root: PathBuf,
    artifacts: Vec<Digest256>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutDir { root: root.into(), artifacts: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.artifacts.retain(|a| a.name != name);
        self.artifacts.push(Digest256 { name: name.into(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn artifacts(&self) -> &[Digest256] {
        &self.artifacts
    }

    /// Write `manifest.json` describing this run.
    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf> {
        manifest.artifacts = self.artifacts.clone();
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

pub fn file_digest(path: &Path) -> Result<Digest256> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Digest256 {
        name: path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()),
        sha256: sha256_hex(&bytes),
    })
}

pub fn versions() -> serde_json::Value {
    serde_json::json!({ "uoh": env!("CARGO_PKG_VERSION") })
}
