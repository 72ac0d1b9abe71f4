use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Content digest of one file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything needed to re-run a stage and check its outputs.
///
/// `created_at` is the only field allowed to differ between two runs with
/// identical inputs and settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunManifest {
    pub tool_version: String,
    pub stage: String,
    pub created_at: String,
    pub seeds: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u8>,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
    pub counts: BTreeMap<String, u64>,
    /// Pair ids per split, when the stage knows them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splits: Option<BTreeMap<String, Vec<String>>>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(stage: impl Into<String>, tool_version: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            tool_version: tool_version.into(),
            ..Self::default()
        }
    }

    /// Copy with the timestamp blanked, for run-to-run comparison.
    pub fn without_timestamp(&self) -> Self {
        Self {
            created_at: String::new(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Stream a file through SHA-256.
pub fn digest_file(path: &Path) -> io::Result<FileDigest> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> io::Result<()> {
    fs::write(path, manifest.to_json())
}

pub fn read_manifest(path: &Path) -> io::Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}
