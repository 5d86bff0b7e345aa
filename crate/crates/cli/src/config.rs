//! Run configuration. Every table rejects unknown keys so a typo never
//! silently falls back to a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use weakphase_core::{io, presets, SampledField};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Retrieve,
    Crystal,
    Sliver,
    Bridge,
    Zeros,
}

impl ScenarioName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Retrieve => "retrieve",
            ScenarioName::Crystal => "crystal",
            ScenarioName::Sliver => "sliver",
            ScenarioName::Bridge => "bridge",
            ScenarioName::Zeros => "zeros",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    /// A blank file reads as an empty table, so the error names the missing key.
    pub fn parse(text: &str) -> CliResult<Self> {
        let text = if text.trim().is_empty() { "{}" } else { text };
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Decodes `parameters` into the scenario's own table.
    pub fn parameters<T: serde::de::DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_value(serde_json::Value::Object(self.parameters.clone()))
            .map_err(|e| CliError::Config(format!("invalid parameters for `{}`: {e}", self.scenario.as_str())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Gaussian,
    ChirpedGaussian,
    CubicPhaseGaussian,
    TwoSpikes,
    PointMass,
    RandomSmooth,
}

/// A built-in object or a field file in `x,re,im` format. Unset shape
/// parameters take the defaults listed on [`ObjectSpec::build`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub preset: Option<Preset>,
    pub file: Option<PathBuf>,
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub center: Option<f64>,
    pub n: Option<usize>,
    pub oversample: Option<f64>,
    pub separation: Option<f64>,
    pub dx: Option<f64>,
}

impl ObjectSpec {
    pub fn preset(preset: Preset) -> Self {
        Self {
            preset: Some(preset),
            ..Self::default()
        }
    }

    /// Defaults: `sigma` 1, `beta` 0.3, `kappa` 0.1, `center` 0, `n` 1024,
    /// `oversample` 4, `separation` 1, `dx` 0.25. Relative file paths resolve
    /// against `base`.
    pub fn build(&self, seed: u64, base: &Path) -> CliResult<SampledField> {
        let sigma = self.sigma.unwrap_or(1.0);
        let n = self.n.unwrap_or(1024);
        let oversample = self.oversample.unwrap_or(4.0);
        let field = match (&self.preset, &self.file) {
            (Some(_), Some(_)) => return Err(CliError::Config("object: give either `preset` or `file`, not both".into())),
            (None, None) => return Err(CliError::Config("object: missing `preset` or `file`".into())),
            (None, Some(path)) => io::load_field(&base.join(path))?,
            (Some(preset), None) => match preset {
                Preset::Gaussian => presets::gaussian(sigma, n, oversample)?,
                Preset::ChirpedGaussian => presets::chirped_gaussian(
                    sigma,
                    self.beta.unwrap_or(0.3),
                    self.center.unwrap_or(0.0),
                    n,
                    oversample,
                )?,
                Preset::CubicPhaseGaussian => presets::cubic_phase_gaussian(sigma, self.kappa.unwrap_or(0.1), n, oversample)?,
                Preset::TwoSpikes => presets::two_spikes(self.separation.unwrap_or(1.0), n)?,
                Preset::PointMass => presets::point_mass(n, self.dx.unwrap_or(0.25))?,
                Preset::RandomSmooth => presets::random_smooth(seed, n, self.dx.unwrap_or(0.25))?,
            },
        };
        Ok(field)
    }
}
