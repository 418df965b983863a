//! Resolution of flags, config file and built-in defaults into model inputs.

use std::fs;

use msum::{ContractSpec, MarketParams};
use serde::Deserialize;

use crate::cli::{McOptions, ModelArgs};
use crate::CliError;

pub const DEFAULT_RATE: f64 = 0.03;
pub const DEFAULT_DIV: f64 = 0.02;
pub const DEFAULT_VOL: f64 = 0.20;
pub const DEFAULT_TERM: f64 = 1.0;
pub const DEFAULT_MONTHS: u32 = 12;
pub const DEFAULT_CAP: f64 = 0.025;
pub const DEFAULT_PATHS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cap: Option<f64>,
    pub floor: Option<f64>,
    pub vol: Option<f64>,
    pub rate: Option<f64>,
    pub div: Option<f64>,
    pub term: Option<f64>,
    pub months: Option<u32>,
    pub order: Option<u32>,
    pub seed: Option<u64>,
    pub mc_paths: Option<u64>,
    pub antithetic: Option<bool>,
}

impl FileConfig {
    pub fn load(model: &ModelArgs) -> Result<Self, CliError> {
        let Some(path) = &model.config else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("config: cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("config: {}: {}", path.display(), e.message())))
    }
}

/// Fully resolved model inputs before validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelInputs {
    pub cap: f64,
    pub floor: Option<f64>,
    pub vol: f64,
    pub rate: f64,
    pub div: f64,
    pub term: f64,
    pub months: u32,
}

impl ModelInputs {
    pub fn resolve(model: &ModelArgs, file: &FileConfig) -> Self {
        Self {
            cap: model.cap.or(file.cap).unwrap_or(DEFAULT_CAP),
            floor: model.floor.or(file.floor),
            vol: model.vol.or(file.vol).unwrap_or(DEFAULT_VOL),
            rate: model.rate.or(file.rate).unwrap_or(DEFAULT_RATE),
            div: model.div.or(file.div).unwrap_or(DEFAULT_DIV),
            term: model.term.or(file.term).unwrap_or(DEFAULT_TERM),
            months: model.months.or(file.months).unwrap_or(DEFAULT_MONTHS),
        }
    }

    pub fn market(&self) -> Result<MarketParams, CliError> {
        Ok(MarketParams::new(self.rate, self.div, self.vol, self.term, self.months)?)
    }

    pub fn contract(&self) -> Result<ContractSpec, CliError> {
        Ok(ContractSpec::new(self.cap, self.floor)?)
    }
}

pub fn mc_config(paths: Option<u64>, opts: &McOptions, file: &FileConfig) -> msum::McConfig {
    msum::McConfig::new(
        paths.or(file.mc_paths).unwrap_or(DEFAULT_PATHS),
        opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    )
    .antithetic(opts.antithetic || file.antithetic.unwrap_or(false))
    .common_random_numbers(!opts.independent_streams)
}
