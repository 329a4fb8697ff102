//! JSON experiment configuration. Every field is optional; command-line flags
//! take precedence over the file.

use std::path::Path;

use anyhow::{Context, Result};
use coherent_shor::codes::{IonMapping, ShorVariant};
use coherent_shor::noise::NoiseModel;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub noise: Option<NoiseModel>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub sample_readout: Option<bool>,
    pub variant: Option<ShorVariant>,
    pub distance: Option<usize>,
    pub mapping: Option<IonMapping>,
    pub times: Option<Vec<f64>>,
    pub wait: Option<f64>,
    pub phases: Option<Vec<f64>>,
    pub amplitudes: Option<Vec<f64>>,
}

pub enum ConfigError {
    Unreadable(anyhow::Error),
    Invalid(anyhow::Error),
}

pub fn load(path: &Path) -> std::result::Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(ConfigError::Unreadable)?;
    parse(&text).with_context(|| format!("parsing config {}", path.display())).map_err(ConfigError::Invalid)
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text)?;
    if let Some(noise) = &config.noise {
        noise.validate()?;
    }
    Ok(config)
}
