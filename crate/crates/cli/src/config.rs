//! Optional TOML defaults. Keys mirror the long flags with `_` for `-`;
//! unknown keys are rejected.
//!
//! ```toml
//! model = "iso"
//! gamma = 1.0
//! delta_g = 0.5
//! delta_min = -5.0
//! ```

use crate::args::{FormatArg, ModeArg, ModelArg, OrderArg};
use crate::error::CliError;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelKey>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub beta_a: Option<f64>,
    pub gamma1: Option<f64>,
    pub delta_g: Option<f64>,
    pub delta: Option<f64>,
    pub omega_rabi: Option<f64>,
    pub chi_prefactor: Option<f64>,
    pub omega_over_c: Option<f64>,
    pub c_a_re: Option<f64>,
    pub c_a_im: Option<f64>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_step: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_step: Option<f64>,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub order: Option<u8>,
    pub mode: Option<ModeKey>,
    pub carrier: Option<f64>,
    pub bandwidth: Option<f64>,
    pub samples: Option<usize>,
    pub dt: Option<f64>,
    pub length: Option<f64>,
    pub window_min: Option<f64>,
    pub window_max: Option<f64>,
    pub format: Option<FormatKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKey {
    Iso,
    Aniso,
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKey {
    Perturbative,
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKey {
    Csv,
    Plot,
}

impl From<ModelKey> for ModelArg {
    fn from(k: ModelKey) -> Self {
        match k {
            ModelKey::Iso => ModelArg::Iso,
            ModelKey::Aniso => ModelArg::Aniso,
            ModelKey::Markov => ModelArg::Markov,
        }
    }
}

impl From<ModeKey> for ModeArg {
    fn from(k: ModeKey) -> Self {
        match k {
            ModeKey::Perturbative => ModeArg::Perturbative,
            ModeKey::Coupled => ModeArg::Coupled,
        }
    }
}

impl From<FormatKey> for FormatArg {
    fn from(k: FormatKey) -> Self {
        match k {
            FormatKey::Csv => FormatArg::Csv,
            FormatKey::Plot => FormatArg::Plot,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("config {}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(e.message().to_string()))
    }

    pub fn order(&self) -> Result<Option<OrderArg>, CliError> {
        match self.order {
            None => Ok(None),
            Some(1) => Ok(Some(OrderArg::First)),
            Some(2) => Ok(Some(OrderArg::Second)),
            Some(n) => Err(CliError::Usage(format!("order must be 1 or 2, got {n}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c = FileConfig::parse("model = \"markov\"\ngamma1 = 2.0\norder = 1\n").unwrap();
        assert_eq!(c.model, Some(ModelKey::Markov));
        assert_eq!(c.gamma1, Some(2.0));
        assert_eq!(c.order().unwrap(), Some(OrderArg::First));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let err = FileConfig::parse("gama = 1.0\n").unwrap_err();
        assert!(matches!(err, CliError::Usage(ref m) if m.contains("gama")), "{err}");
        assert!(FileConfig::parse("model = \"lorentz\"\n").is_err());
        assert!(FileConfig::parse("order = 3\n").unwrap().order().is_err());
    }
}
