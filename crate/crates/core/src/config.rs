//! TOML run configuration with strict schema checking and dotted-key
//! overrides.
//!
//! Unknown fields are rejected, `schema_version` is mandatory and must
//! match [`SCHEMA_VERSION`], and command-line overrides are applied to
//! the raw TOML value before deserialization so they obey exactly the
//! same validation as file contents.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::classify::Thresholds;
use crate::exponent::ProcessParams;
use crate::simulate::SimConfig;
use crate::spherical::{
    TransformPlan, DEFAULT_K_ORDER, DEFAULT_LAMBDA_MAX, DEFAULT_N_LAMBDA, DEFAULT_N_RADIAL,
    DEFAULT_T_MAX,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default = "d_horizon")]
    pub horizon: f64,
    #[serde(default = "d_step")]
    pub step: f64,
    #[serde(default = "d_paths")]
    pub n_paths: usize,
    #[serde(default = "d_ball")]
    pub ball_radius: f64,
}

fn d_horizon() -> f64 {
    5.0
}
fn d_step() -> f64 {
    1e-3
}
fn d_paths() -> usize {
    200
}
fn d_ball() -> f64 {
    1.0
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection { horizon: d_horizon(), step: d_step(), n_paths: d_paths(), ball_radius: d_ball() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    #[serde(default = "d_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "d_n_lambda")]
    pub n_lambda: usize,
    #[serde(default = "d_t_max")]
    pub t_max: f64,
    #[serde(default = "d_n_radial")]
    pub n_radial: usize,
    #[serde(default = "d_k_order")]
    pub k_order: usize,
    /// Upper end of the low-frequency window for the harmonic integral.
    #[serde(default = "d_lambda0")]
    pub lambda0: f64,
}

fn d_lambda_max() -> f64 {
    DEFAULT_LAMBDA_MAX
}
fn d_n_lambda() -> usize {
    DEFAULT_N_LAMBDA
}
fn d_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn d_n_radial() -> usize {
    DEFAULT_N_RADIAL
}
fn d_k_order() -> usize {
    DEFAULT_K_ORDER
}
fn d_lambda0() -> f64 {
    1.0
}

impl Default for SpectralSection {
    fn default() -> Self {
        SpectralSection {
            lambda_max: d_lambda_max(),
            n_lambda: d_n_lambda(),
            t_max: d_t_max(),
            n_radial: d_n_radial(),
            k_order: d_k_order(),
            lambda0: d_lambda0(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    #[serde(default = "d_recurrent_z")]
    pub recurrent_z: f64,
    #[serde(default = "d_transient_se")]
    pub transient_se: f64,
}

fn d_recurrent_z() -> f64 {
    3.0
}
fn d_transient_se() -> f64 {
    1.0
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection { recurrent_z: d_recurrent_z(), transient_se: d_transient_se() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub process: ProcessParams,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub classify: ClassifySection,
}

impl RunConfig {
    /// Parse TOML text, applying `key.path=value` overrides first.
    pub fn parse(text: &str, overrides: &[String]) -> Result<RunConfig> {
        let mut value: toml::Value =
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse error: {e}")))?;
        for ov in overrides {
            apply_override(&mut value, ov)?;
        }
        let cfg: RunConfig = value
            .try_into()
            .map_err(|e| Error::Config(format!("config schema error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.process.validate()?;
        if !(self.spectral.lambda0 > 0.0 && self.spectral.lambda0 <= self.spectral.lambda_max) {
            return Err(Error::Config("spectral.lambda0 must lie in (0, lambda_max]".into()));
        }
        Ok(())
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            params: self.process.clone(),
            horizon: self.simulation.horizon,
            step: self.simulation.step,
            n_paths: self.simulation.n_paths,
            seed,
            ball_radius: self.simulation.ball_radius,
        }
    }

    pub fn build_plan(&self) -> Result<TransformPlan> {
        TransformPlan::new(
            self.spectral.lambda_max,
            self.spectral.n_lambda,
            self.spectral.t_max,
            self.spectral.n_radial,
            self.spectral.k_order,
        )
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            recurrent_z: self.classify.recurrent_z,
            transient_se: self.classify.transient_se,
        }
    }

    /// Resolved configuration, for echoing into run outputs.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Apply one `dotted.key=value` override to a TOML value tree.
/// The value side is parsed as TOML (so numbers, booleans and quoted
/// strings work); bare words fall back to strings.
fn apply_override(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not of the form key=value")))?;
    let parsed: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key '{key}' has an empty segment")));
    }
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key '{key}' crosses a non-table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("override key '{key}' crosses a non-table")))?;
    table.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}
