use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ice::ScenarioParams;
use crate::navigator::{NavigatorConfig, NavigatorKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// A batch of paired trials: every navigator runs on every
/// (concentration, trial) scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatchConfig {
    pub concentrations: Vec<f64>,
    pub trials_per_concentration: usize,
    pub navigators: Vec<NavigatorKind>,
    /// Scenario seeds are `seed, seed + 1, …` per concentration.
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out_dir: PathBuf,
    /// Write a per-step trajectory log for every trial.
    pub save_traces: bool,
    pub scenario: ScenarioParams,
    pub navigator: NavigatorConfig,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            concentrations: vec![0.2, 0.3, 0.4, 0.5],
            trials_per_concentration: 50,
            navigators: NavigatorKind::ALL.to_vec(),
            seed: 0,
            workers: 0,
            out_dir: PathBuf::from("results"),
            save_traces: false,
            scenario: ScenarioParams::default(),
            navigator: NavigatorConfig::default(),
        }
    }
}

impl BatchConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let c: BatchConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials_per_concentration < 1 {
            return Err(ConfigError::Invalid(
                "trials_per_concentration must be at least 1".into(),
            ));
        }
        if self.concentrations.is_empty() {
            return Err(ConfigError::Invalid("no concentrations".into()));
        }
        if let Some(c) = self.concentrations.iter().find(|c| !(0.0..=0.6).contains(*c)) {
            return Err(ConfigError::Invalid(format!("concentration {c} outside [0, 0.6]")));
        }
        let mut seen = self.concentrations.clone();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        if seen.len() != self.concentrations.len() {
            return Err(ConfigError::Invalid("duplicate concentration".into()));
        }
        if self.navigators.is_empty() {
            return Err(ConfigError::Invalid("no navigators".into()));
        }
        let mut navs = self.navigators.clone();
        navs.sort();
        navs.dedup();
        if navs.len() != self.navigators.len() {
            return Err(ConfigError::Invalid("duplicate navigator".into()));
        }
        self.navigator
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.scenario
            .channel
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}
