//! The manifest written at the end of every run.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::config::ExperimentConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub seed: u64,
    /// Check name to verdict.
    pub verdicts: BTreeMap<String, bool>,
    /// Paths relative to the manifest's directory.
    pub artifacts: Vec<String>,
    pub config: ExperimentConfig,
}

pub fn now() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_default()
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, started: String) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config.hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started,
            finished: String::new(),
            seed: config.seed,
            verdicts: BTreeMap::new(),
            artifacts: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a run manifest", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig { seed: 4, ..Default::default() };
        let mut m = RunManifest::new("verify-all", &c, now());
        m.verdicts.insert("zak-parseval".into(), true);
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(m.config_hash, c.hash());
        assert!(m.passed());
    }
}
