//! The run manifest embedded verbatim into every output for reproducibility.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub residual_tol: f64,
    pub max_steps: u64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub trajectory_stride: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub artifact: String,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// sha256 digest per input path.
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
}

impl RunManifest {
    pub fn new() -> Self {
        Self {
            artifact: format!("calaflow {}", env!("CARGO_PKG_VERSION")),
            command: std::env::args().collect(),
            geometry: None,
            solver: None,
            seed: None,
            inputs: BTreeMap::new(),
            config: None,
        }
    }

    pub fn record_input(&mut self, path: &str, bytes: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.inputs
            .insert(path.to_string(), hex::encode(hasher.finalize()));
    }

    /// Compact single-line form, for CSV and SVG comments.
    pub fn compact_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        serde_json::to_string(&value).expect("manifest serializes")
    }
}

/// Pretty-print with sorted keys and a trailing newline.
pub fn to_sorted_pretty<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("output serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("output serializes");
    s.push('\n');
    s
}
