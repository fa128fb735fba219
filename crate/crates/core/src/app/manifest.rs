use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::sha256_hex;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_COPY: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Record of one run. The configuration is copied next to the outputs as
/// `config.toml`; `config_digest` covers that copy plus any input trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_source: String,
    pub config_digest: String,
    pub input_trace: Option<String>,
    pub seed: Option<u64>,
    pub duration_s: f64,
    pub outputs: Vec<OutputFile>,
}

/// Digest over the run inputs: the configuration text, then the trace bytes.
pub fn input_digest(config: &[u8], trace: Option<&[u8]>) -> String {
    let mut all = config.to_vec();
    if let Some(t) = trace {
        all.extend_from_slice(t);
    }
    sha256_hex(&all)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifestMismatch {
    ConfigDigest,
    Missing(String),
    Output(String),
}

impl RunManifest {
    pub fn load(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read(dir.join(MANIFEST_FILE))?;
        serde_json::from_slice(&text).map_err(std::io::Error::other)
    }

    /// Recomputes the input digest and every output hash under `dir`.
    pub fn verify(&self, dir: &Path) -> Vec<ManifestMismatch> {
        let mut out = Vec::new();
        let trace = match &self.input_trace {
            Some(p) => std::fs::read(p).ok(),
            None => None,
        };
        match std::fs::read(dir.join(CONFIG_COPY)) {
            Ok(cfg) if input_digest(&cfg, trace.as_deref()) == self.config_digest => {}
            Ok(_) => out.push(ManifestMismatch::ConfigDigest),
            Err(_) => out.push(ManifestMismatch::Missing(CONFIG_COPY.into())),
        }
        for f in &self.outputs {
            match std::fs::read(dir.join(&f.path)) {
                Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
                Ok(_) => out.push(ManifestMismatch::Output(f.path.clone())),
                Err(_) => out.push(ManifestMismatch::Missing(f.path.clone())),
            }
        }
        out
    }
}
