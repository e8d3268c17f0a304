//! Run manifests: what was produced, from which config, with checksums.
//!
//! Wall-clock timings go to a separate `timing.json` so that the manifest
//! itself is identical across repeated runs of the same config.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exit::CliResult;
use crate::io::write_json;

pub const TOOL: &str = "sonar-knot";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub name: String,
    pub description: String,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub datasets: Vec<DatasetRecord>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug, Clone, Serialize)]
struct Timing<'a> {
    command: &'a str,
    total_seconds: f64,
    steps: Vec<(String, f64)>,
}

/// Collects outputs of one run relative to its output directory.
pub struct ManifestBuilder {
    root: PathBuf,
    manifest: RunManifest,
    steps: Vec<(String, f64)>,
}

impl ManifestBuilder {
    pub fn new(root: &Path, command: &str, config_bytes: &[u8]) -> Self {
        Self {
            root: root.to_path_buf(),
            manifest: RunManifest {
                tool: TOOL.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                config_sha256: sha256_hex(config_bytes),
                datasets: Vec::new(),
                outputs: Vec::new(),
            },
            steps: Vec::new(),
        }
    }

    fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/")
    }

    /// Checksum a file already written under the output directory.
    pub fn record(&mut self, path: &Path) -> CliResult<()> {
        let bytes = std::fs::read(path)?;
        self.manifest.outputs.push(OutputRecord {
            path: self.relative(path),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn dataset(&mut self, name: &str, description: &str, files: &[PathBuf]) -> CliResult<()> {
        for f in files {
            self.record(f)?;
        }
        self.manifest.datasets.push(DatasetRecord {
            name: name.into(),
            description: description.into(),
            files: files.iter().map(|f| self.relative(f)).collect(),
        });
        Ok(())
    }

    pub fn step(&mut self, name: &str, elapsed: Duration) {
        self.steps.push((name.into(), elapsed.as_secs_f64()));
    }

    /// Write `manifest.json` and `timing.json`; returns the manifest.
    pub fn finish(mut self, total: Duration) -> CliResult<RunManifest> {
        self.manifest.outputs.sort_by(|a, b| a.path.cmp(&b.path));
        write_json(&self.root.join("manifest.json"), &self.manifest)?;
        write_json(
            &self.root.join("timing.json"),
            &Timing {
                command: &self.manifest.command,
                total_seconds: total.as_secs_f64(),
                steps: self.steps,
            },
        )?;
        Ok(self.manifest)
    }
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
}
