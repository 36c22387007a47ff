//! Seeded Monte Carlo simulation of bi-invariant Lévy paths.
//!
//! Paths follow the geodesic random-walk scheme: over each time step the
//! diffusion part moves by `exp` of a Gaussian tangent draw with
//! covariance `2 a dt` per coordinate, and jumps occur at exact Poisson
//! times inside the step, each applied as a K-bi-invariant lift of a
//! radius drawn from ν. Every path owns a dedicated ChaCha stream keyed
//! by `(seed, path index)`, so results are reproducible and independent
//! of the parallel schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exponent::ProcessParams;
use crate::group::{self, GroupId};
use crate::spherical::spherical_function_radial;
use crate::{Error, GroupElement, Result};

/// Simulation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub params: ProcessParams,
    /// Base horizon T; occupation statistics also use 2T and 4T.
    pub horizon: f64,
    pub step: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Radius of the ball around the base point for occupation times.
    pub ball_radius: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        if !(self.step > 0.0 && self.step <= self.horizon) {
            return Err(Error::InvalidArgument("step must lie in (0, horizon]".into()));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidArgument("need at least one path".into()));
        }
        if !(self.ball_radius > 0.0) {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        Ok(())
    }
}

/// RNG for one path: seed picks the key, the stream is the path index.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64 + 1);
    rng
}

fn gaussian_increment<R: Rng>(group: GroupId, a: f64, dt: f64, rng: &mut R) -> GroupElement {
    let dim = group.space_dim();
    let sd = (2.0 * a * dt).sqrt();
    let mut v = [0.0f64; 3];
    for vi in v.iter_mut().take(dim) {
        *vi = sd * rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    group::exp_tangent(group, &v[..dim])
}

/// One time step of length `h`: diffusion segments interleaved with the
/// jumps whose exact Poisson times fall inside the step. Returns the
/// increment and the within-step jump offsets.
pub fn sample_increment<R: Rng>(
    params: &ProcessParams,
    h: f64,
    rng: &mut R,
) -> Result<(GroupElement, Vec<f64>)> {
    let group = params.group;
    let rate = params.levy.total_rate();
    let jump_offsets: Vec<f64> = if rate > 0.0 {
        let n = rng.sample(
            rand_distr::Poisson::new(rate * h)
                .map_err(|e| Error::InvalidArgument(format!("invalid jump rate: {e}")))?,
        ) as usize;
        let mut ts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..h)).collect();
        ts.sort_by(f64::total_cmp);
        ts
    } else {
        Vec::new()
    };
    let mut g = GroupElement::identity(group);
    let mut prev = 0.0;
    for &tau in jump_offsets.iter().chain(std::iter::once(&h)) {
        let dt = tau - prev;
        if params.a > 0.0 && dt > 0.0 {
            g = g.multiply(&gaussian_increment(group, params.a, dt, rng))?;
        }
        if tau < h {
            let radius = params.levy.sample_radius(rng)?;
            g = g.multiply(&group::bi_invariant_lift(group, radius, rng))?;
        }
        prev = tau;
    }
    Ok((g, jump_offsets))
}

/// A recorded path: states on the uniform time grid plus jump times.
#[derive(Debug, Clone)]
pub struct PathRecord {
    pub stream: u64,
    pub times: Vec<f64>,
    pub states: Vec<GroupElement>,
    pub jump_times: Vec<f64>,
}

/// Simulate one full path on the time grid `0, h, 2h, …` up to `horizon`.
pub fn simulate_path(cfg: &SimConfig, path: usize) -> Result<PathRecord> {
    cfg.validate()?;
    let mut rng = path_rng(cfg.seed, path);
    let n_steps = (cfg.horizon / cfg.step).ceil() as usize;
    let mut state = GroupElement::identity(cfg.params.group);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut jump_times = Vec::new();
    times.push(0.0);
    states.push(state);
    for i in 0..n_steps {
        let t0 = i as f64 * cfg.step;
        let h = cfg.step.min(cfg.horizon - t0);
        let (inc, offsets) = sample_increment(&cfg.params, h, &mut rng)?;
        for off in offsets {
            jump_times.push(t0 + off);
        }
        state = state.multiply(&inc)?;
        times.push(t0 + h);
        states.push(state);
    }
    Ok(PathRecord { stream: path as u64 + 1, times, states, jump_times })
}

/// Time spent by a sampled distance path inside `[0, r]`, with linear
/// interpolation across ball-boundary crossings.
pub fn occupation_time(distances: &[f64], step: f64, r: f64) -> f64 {
    let mut acc = 0.0;
    for w in distances.windows(2) {
        let (d0, d1) = (w[0], w[1]);
        let frac = if d0 <= r && d1 <= r {
            1.0
        } else if d0 > r && d1 > r {
            0.0
        } else if d0 <= r {
            // exits partway through the interval
            (r - d0) / (d1 - d0)
        } else {
            // enters partway through the interval
            (r - d1) / (d0 - d1)
        };
        acc += frac * step;
    }
    acc
}

/// Occupation statistics of the ball `B(o, r)` at horizons T, 2T, 4T,
/// aggregated over paths.
#[derive(Debug, Clone, Serialize)]
pub struct OccupationStats {
    pub horizons: [f64; 3],
    pub mean: [f64; 3],
    pub std_err: [f64; 3],
    /// Least-squares slope of per-path occupation against the horizon
    /// index (equivalently half the T→4T occupation gain).
    pub slope_mean: f64,
    pub slope_se: f64,
    /// Occupation gained between horizons 2T and 4T.
    pub last_increment_mean: f64,
    pub last_increment_se: f64,
    pub n_paths: usize,
    pub ball_radius: f64,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo occupation-time estimate. Paths are simulated to 4T in a
/// streaming fashion (states are not stored), in parallel, each on its
/// own deterministic RNG stream.
pub fn potential_estimate(cfg: &SimConfig) -> Result<OccupationStats> {
    cfg.validate()?;
    let horizons = [cfg.horizon, 2.0 * cfg.horizon, 4.0 * cfg.horizon];
    let n_steps = (horizons[2] / cfg.step).ceil() as usize;
    let checkpoints: Vec<usize> = horizons
        .iter()
        .map(|t| ((t / cfg.step).round() as usize).min(n_steps))
        .collect();
    let per_path: Vec<[f64; 3]> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| -> Result<[f64; 3]> {
            let mut rng = path_rng(cfg.seed, p);
            let mut state = GroupElement::identity(cfg.params.group);
            let mut prev_d = 0.0f64;
            let mut acc = 0.0f64;
            let mut out = [0.0f64; 3];
            let mut next_cp = 0usize;
            for i in 0..n_steps {
                let (inc, _) = sample_increment(&cfg.params, cfg.step, &mut rng)?;
                state = state.multiply(&inc)?;
                let d = state.cartan_radial();
                let r = cfg.ball_radius;
                let frac = if prev_d <= r && d <= r {
                    1.0
                } else if prev_d > r && d > r {
                    0.0
                } else if prev_d <= r {
                    (r - prev_d) / (d - prev_d)
                } else {
                    (prev_d - r) / (prev_d - d)
                };
                acc += frac * cfg.step;
                prev_d = d;
                while next_cp < 3 && i + 1 == checkpoints[next_cp] {
                    out[next_cp] = acc;
                    next_cp += 1;
                }
            }
            while next_cp < 3 {
                out[next_cp] = acc;
                next_cp += 1;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| -> Vec<f64> { per_path.iter().map(|o| o[k]).collect() };
    let (m0, s0) = mean_se(&col(0));
    let (m1, s1) = mean_se(&col(1));
    let (m2, s2) = mean_se(&col(2));
    let slopes: Vec<f64> = per_path.iter().map(|o| (o[2] - o[0]) / 2.0).collect();
    let (slope_mean, slope_se) = mean_se(&slopes);
    let incs: Vec<f64> = per_path.iter().map(|o| o[2] - o[1]).collect();
    let (inc_mean, inc_se) = mean_se(&incs);
    Ok(OccupationStats {
        horizons,
        mean: [m0, m1, m2],
        std_err: [s0, s1, s2],
        slope_mean,
        slope_se,
        last_increment_mean: inc_mean,
        last_increment_se: inc_se,
        n_paths: cfg.n_paths,
        ball_radius: cfg.ball_radius,
    })
}

/// Monte Carlo estimate of `E[f(X_t)]` at `t = cfg.horizon`.
pub fn mc_expectation(
    cfg: &SimConfig,
    f: impl Fn(&GroupElement) -> f64 + Sync,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let n_steps = (cfg.horizon / cfg.step).ceil() as usize;
    let vals: Vec<f64> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| -> Result<f64> {
            let mut rng = path_rng(cfg.seed, p);
            let mut state = GroupElement::identity(cfg.params.group);
            for i in 0..n_steps {
                let t0 = i as f64 * cfg.step;
                let h = cfg.step.min(cfg.horizon - t0);
                let (inc, _) = sample_increment(&cfg.params, h, &mut rng)?;
                state = state.multiply(&inc)?;
            }
            Ok(f(&state))
        })
        .collect::<Result<_>>()?;
    Ok(mean_se(&vals))
}

/// Monte Carlo estimate of the spherical moment `E[φ_λ(X_t)]`
/// (SL2R only); its exact value is `e^{-t η_λ}`.
pub fn mc_spherical_moment(cfg: &SimConfig, lambda: f64) -> Result<(f64, f64)> {
    if cfg.params.group != GroupId::Sl2r {
        return Err(Error::UnsupportedGroup(cfg.params.group));
    }
    mc_expectation(cfg, |g| spherical_function_radial(lambda, g.cartan_radial(), 64))
}
