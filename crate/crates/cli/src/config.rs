//! The run configuration document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tfzak_core::experiments::{Representation, SignalFamily};
use tfzak_core::io::Precision;
use tfzak_core::norms::NormSpec;
use tfzak_core::transforms::StftOptions;
use tfzak_core::{OrderedBasis, Weight, Window};

use crate::checks::CheckKind;
use crate::signals::SignalSpec;

/// One JSON document per run. Every key is optional; flags override keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<CheckKind>,
    pub seed: u64,
    pub quick: bool,
    /// Relative corruption planted into identity checks.
    pub plant_defect: Option<f64>,
    pub basis: Option<OrderedBasis>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub r: Option<Vec<f64>>,
    pub weight: Option<Weight>,
    pub family: Option<SignalFamily>,
    pub resolution: Option<Resolution>,
    pub out_dir: Option<PathBuf>,
    pub transform: Option<TransformConfig>,
    pub norm: Option<NormConfig>,
}

/// Coarse and fine sampling steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub coarse: f64,
    pub fine: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { coarse: 1.0 / 64.0, fine: 1.0 / 128.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Zak,
    Stft,
    FiniteZak,
    Coefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub kind: TransformKind,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    #[serde(default)]
    pub window: Option<Window>,
    #[serde(default)]
    pub stft: Option<StftOptions>,
    /// Finite Zak: signal length `L` and rows `M`.
    #[serde(default)]
    pub length: Option<usize>,
    #[serde(default)]
    pub rows: Option<usize>,
    /// Coefficients: largest `|m|` kept.
    #[serde(default)]
    pub cutoff: Option<i64>,
    #[serde(default)]
    pub precision: Precision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub spec: NormSpec,
    #[serde(default)]
    pub on: Representation,
    /// A single signal; otherwise the configured family is used.
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    /// Sampling box `[lo, hi)` per axis.
    #[serde(default)]
    pub lo: Option<f64>,
    #[serde(default)]
    pub hi: Option<f64>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            ConfigError(format!("config error at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution.unwrap_or_default()
    }
}
