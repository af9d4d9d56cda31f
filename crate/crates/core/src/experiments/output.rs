//! File emission for experiment results: one CSV and one JSON per run.
//!
//! The CSV carries a self-describing header row and plot-ready columns. The
//! JSON wraps the same data together with a `meta` block (seed, sample
//! count, effective configuration and its hash) sufficient to re-run the
//! experiment bit-identically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Which files a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "both" => Some(Self::Both),
            _ => None,
        }
    }

    fn wants_csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    fn wants_json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

/// Run provenance embedded in every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub experiment: String,
    pub version: String,
    pub schema_version: u32,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
    pub config: serde_json::Value,
    pub config_hash: String,
}

impl RunMeta {
    pub fn new(
        experiment: &str,
        seed: u64,
        sample_count: Option<u64>,
        config: serde_json::Value,
    ) -> Self {
        let config_hash = config_hash(&config);
        Self {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: crate::experiments::SCHEMA_VERSION,
            seed,
            sample_count,
            config,
            config_hash,
        }
    }
}

/// SHA-256 over the canonical JSON text of the effective configuration.
pub fn config_hash(config: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Write `<name>.csv` / `<name>.json` under `dir` per the requested format.
/// Returns the paths written.
pub fn write_outputs(
    dir: &Path,
    name: &str,
    meta: &RunMeta,
    csv: &str,
    data: &serde_json::Value,
    format: OutputFormat,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.wants_csv() {
        let path = dir.join(format!("{name}.csv"));
        std::fs::File::create(&path)?.write_all(csv.as_bytes())?;
        written.push(path);
    }
    if format.wants_json() {
        let wrapped = serde_json::json!({ "meta": meta, "data": data });
        let mut text = serde_json::to_string_pretty(&wrapped).expect("data serializes");
        text.push('\n');
        let path = dir.join(format!("{name}.json"));
        std::fs::File::create(&path)?.write_all(text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let a = serde_json::json!({"seed": 1, "samples": 10});
        let b = serde_json::json!({"seed": 2, "samples": 10});
        assert_eq!(config_hash(&a), config_hash(&a));
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn writes_requested_formats() {
        let dir = tempfile::tempdir().unwrap();
        let meta = RunMeta::new("demo", 1, Some(10), serde_json::json!({"k": 1}));
        let data = serde_json::json!([1, 2, 3]);
        let paths =
            write_outputs(dir.path(), "demo", &meta, "a,b\n1,2\n", &data, OutputFormat::Both)
                .unwrap();
        assert_eq!(paths.len(), 2);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(json["meta"]["experiment"], "demo");
        assert_eq!(json["meta"]["schema_version"], 1);
        assert_eq!(json["data"][2], 3);
    }
}
