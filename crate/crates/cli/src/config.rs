//! Run configuration: the channel model plus run controls, read from JSON or TOML.

use std::path::{Path, PathBuf};

use marc_core::channel::{BandConfig, DualBandConfig, Placement, QmcSettings};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub microwave: BandConfig,
    pub mmwave: BandConfig,
    pub alpha: f64,
    pub placement: Placement,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub qmc_samples: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    #[cfg(test)]
    pub fn from_model(cfg: &DualBandConfig) -> Self {
        RunConfig {
            microwave: cfg.microwave,
            mmwave: cfg.mmwave,
            alpha: cfg.alpha,
            placement: cfg.placement,
            gamma: cfg.gamma,
            seed: None,
            qmc_samples: None,
            tol: None,
            output: None,
        }
    }

    /// Parses by extension: `.toml` as TOML, anything else as JSON.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let err = |message: String| CliError::Config { path: path.to_path_buf(), message };
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| err(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| err(e.to_string()))?
        };
        if let Some(t) = cfg.tol {
            if !(t > 0.0) {
                return Err(err(format!("tol must be positive (got {t})")));
            }
        }
        cfg.model(0).validate().map_err(|e| err(e.to_string()))?;
        Ok(cfg)
    }

    /// Channel model with the QMC stream seeded by `seed`.
    pub fn model(&self, seed: u64) -> DualBandConfig {
        DualBandConfig {
            microwave: self.microwave,
            mmwave: self.mmwave,
            alpha: self.alpha,
            placement: self.placement,
            gamma: self.gamma,
            qmc: QmcSettings { samples: self.qmc_samples.unwrap_or(QmcSettings::default().samples), seed },
        }
    }
}
