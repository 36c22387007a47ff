//! Named run presets covering the shipped process families. Each preset
//! is ordinary config TOML and goes through the same parser and
//! validation as user files.

use crate::config::RunConfig;
use crate::{Error, Result};

pub const PRESET_NAMES: &[&str] = &[
    "su2-diffusion",
    "sl2r-diffusion",
    "sl2r-compound-poisson",
    "sl2r-diffusion-jumps",
    "sl2r-stable",
    "sl2r-asymmetric",
];

fn preset_toml(name: &str) -> Option<&'static str> {
    Some(match name {
        // Brownian motion on the compact instance: the recurrent reference
        "su2-diffusion" => {
            r#"
schema_version = 1

[process]
group = "su2"
a = 1.0

[process.levy]
kind = "zero"

[simulation]
horizon = 2.0
step = 1e-3
n_paths = 200
ball_radius = 1.0
"#
        }
        // Brownian motion on the hyperbolic plane
        "sl2r-diffusion" => {
            r#"
schema_version = 1

[process]
group = "sl2r"
a = 1.0

[process.levy]
kind = "zero"

[simulation]
horizon = 5.0
step = 1e-3
n_paths = 200
ball_radius = 1.0
"#
        }
        // pure jumps: unit-rate point mass at radius 1
        "sl2r-compound-poisson" => {
            r#"
schema_version = 1

[process]
group = "sl2r"
a = 0.0

[process.levy]
kind = "point-masses"
atoms = [{ radius = 1.0, rate = 1.0 }]

[simulation]
horizon = 10.0
step = 1e-2
n_paths = 400
ball_radius = 1.0
"#
        }
        // diffusion plus finite-activity exponential jumps
        "sl2r-diffusion-jumps" => {
            r#"
schema_version = 1

[process]
group = "sl2r"
a = 0.5

[process.levy]
kind = "truncated-exponential"
weight = 1.0
cutoff = 0.0

[simulation]
horizon = 5.0
step = 1e-3
n_paths = 200
ball_radius = 1.0
"#
        }
        // jump-dominated stable-like tail, truncated on both ends
        "sl2r-stable" => {
            r#"
schema_version = 1

[process]
group = "sl2r"
a = 0.0

[process.levy]
kind = "stable-like"
weight = 1.0
alpha = 1.0
cutoff = 0.05
t_max = 5.0

[simulation]
horizon = 5.0
step = 1e-2
n_paths = 200
ball_radius = 1.0
"#
        }
        // declared non-symmetric: classification goes through 2 Re η
        "sl2r-asymmetric" => {
            r#"
schema_version = 1

[process]
group = "sl2r"
a = 0.3
symmetric = false

[process.levy]
kind = "point-masses"
atoms = [{ radius = 0.8, rate = 0.7 }]

[simulation]
horizon = 5.0
step = 1e-3
n_paths = 200
ball_radius = 1.0
"#
        }
        _ => return None,
    })
}

/// Resolve a preset by name, with optional `key=value` overrides.
pub fn preset(name: &str, overrides: &[String]) -> Result<RunConfig> {
    let text = preset_toml(name).ok_or_else(|| {
        Error::Config(format!("unknown preset '{name}' (available: {})", PRESET_NAMES.join(", ")))
    })?;
    RunConfig::parse(text, overrides)
}
