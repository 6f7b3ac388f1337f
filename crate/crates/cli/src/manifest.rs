//! Run manifests: a JSON sidecar recording how each output was produced.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub rules: Vec<String>,
    pub seed: u64,
    pub config: Value,
    /// Hash of the canonical JSON of command, rules, seed and config.
    pub config_sha256: String,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<FileDigest, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

/// RFC 3339 time of the run. `SOURCE_DATE_EPOCH` pins it for reproducible
/// builds of the manifest itself.
fn timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

impl RunManifest {
    pub fn new(command: &str, rules: Vec<String>, seed: u64, config: Value) -> Self {
        let canonical = serde_json::json!({
            "command": command,
            "rules": rules,
            "seed": seed,
            "config": config,
        });
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            inputs: Vec::new(),
            config_sha256: sha256_hex(canonical.to_string().as_bytes()),
            rules,
            seed,
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), Failure> {
        self.inputs.push(digest_file(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<(), Failure> {
        self.outputs.push(digest_file(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Failure::Other(e.to_string()))?;
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Other(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar(Path::new("out/metrics.csv")),
            PathBuf::from("out/metrics.csv.manifest.json")
        );
    }

    #[test]
    fn config_hash_ignores_time() {
        let a = RunManifest::new("analyze", vec!["borda".into()], 1, serde_json::json!({"x": 1}));
        let b = RunManifest::new("analyze", vec!["borda".into()], 1, serde_json::json!({"x": 1}));
        let c = RunManifest::new("analyze", vec!["borda".into()], 2, serde_json::json!({"x": 1}));
        assert_eq!(a.config_sha256, b.config_sha256);
        assert_ne!(a.config_sha256, c.config_sha256);
    }
}
