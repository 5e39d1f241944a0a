//! Run configuration: JSON file plus flag overrides (flags win). Unknown
//! keys are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use renvol_core::series::LadderSpec;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub verification: Option<String>,
    #[serde(default)]
    pub numeric: Option<NumericSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    /// latitude parameter of the cap family
    #[serde(default)]
    pub cap: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    #[serde(default)]
    pub ladder: Option<LadderConfig>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub eps0: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl LadderConfig {
    pub fn validate(&self) -> Result<LadderSpec, String> {
        if !(self.eps0 > 0.0 && self.eps0 <= 0.5) {
            return Err(format!("ladder.eps0 = {} outside (0, 0.5]", self.eps0));
        }
        if !(self.ratio > 0.3 && self.ratio < 1.0) {
            return Err(format!("ladder.ratio = {} outside (0.3, 1)", self.ratio));
        }
        if !(6..=24).contains(&self.rungs) {
            return Err(format!("ladder.rungs = {} outside [6, 24]", self.rungs));
        }
        Ok(LadderSpec { eps0: self.eps0, ratio: self.ratio, rungs: self.rungs })
    }
}

/// Fully resolved configuration for one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub verification: String,
    pub model: String,
    pub cap: f64,
    pub epsilon: f64,
    pub ladder: LadderSpec,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }
}
