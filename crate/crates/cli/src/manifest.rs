use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Audit record written as `manifest.json` next to a command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub base_seed: u64,
    pub library_version: &'static str,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputFile>,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects outputs and writes the manifest once the command finishes.
pub struct ManifestBuilder {
    command: String,
    config: Value,
    base_seed: u64,
    started: f64,
    files: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn start(command: &str, config: Value, base_seed: u64) -> Self {
        ManifestBuilder { command: command.to_string(), config, base_seed, started: now(), files: Vec::new() }
    }

    pub fn add(&mut self, path: PathBuf) {
        self.files.push(path);
    }

    pub fn extend(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.files.extend(paths);
    }

    /// Hashes every output relative to `out_dir` and writes `manifest.json`.
    pub fn finish(self, out_dir: &Path) -> CliResult<PathBuf> {
        let mut outputs = Vec::with_capacity(self.files.len());
        for path in &self.files {
            let bytes = std::fs::read(path)?;
            let rel = path.strip_prefix(out_dir).unwrap_or(path);
            outputs.push(OutputFile {
                path: rel.to_string_lossy().into_owned(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(&bytes),
            });
        }
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            base_seed: self.base_seed,
            library_version: env!("CARGO_PKG_VERSION"),
            started_unix: self.started,
            finished_unix: now(),
            outputs,
        };
        let path = out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
