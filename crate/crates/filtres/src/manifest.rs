//! Run manifest: the resolved configuration, library version, seed, timing
//! and a SHA-256 digest of every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub started: String,
    pub finished: String,
    pub config: Config,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

impl RunManifest {
    pub fn new(command: &str, config: &Config, started: chrono::DateTime<chrono::Utc>) -> RunManifest {
        RunManifest {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: config.task.seed,
            started: started.to_rfc3339(),
            finished: String::new(),
            config: config.clone(),
            outputs: Vec::new(),
        }
    }

    /// Digests `files` (relative to `dir`) and stamps the finish time.
    pub fn finish(&mut self, dir: &Path, files: &[PathBuf]) -> Result<()> {
        for rel in files {
            let (bytes, sha256) = sha256_file(&dir.join(rel))?;
            self.outputs.push(OutputFile { path: rel.clone(), bytes, sha256 });
        }
        self.finished = chrono::Utc::now().to_rfc3339();
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).expect("manifest is always serializable");
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
    }

    /// Recomputes every digest; fails on the first missing or altered file.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for out in &self.outputs {
            let (bytes, sha256) = sha256_file(&dir.join(&out.path))
                .map_err(|_| Error::Manifest(format!("{} is missing", out.path.display())))?;
            if bytes != out.bytes || sha256 != out.sha256 {
                return Err(Error::Manifest(format!("{} does not match its recorded digest", out.path.display())));
            }
        }
        Ok(())
    }
}
