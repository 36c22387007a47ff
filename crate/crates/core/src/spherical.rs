//! Spherical functions, the spherical transform and Plancherel inversion
//! for the hyperbolic-plane instance.
//!
//! In the curvature −1 normalization the spherical function is the conical
//! (Mehler) function `φ_λ(a_t) = P_{-1/2+iλ}(cosh t)`, the Plancherel
//! density is proportional to `λ·tanh(πλ)` and the radial volume density
//! is `sinh t`. With the transform pair written against these densities
//! the Plancherel constant κ is 1 up to Haar conventions; it is calibrated
//! once per plan from a reference bump and cross-checked by the Plancherel
//! identity.
//!
//! φ is evaluated two ways:
//! * on product grids, by propagating the radial eigenfunction equation
//!   `u'' + coth(t) u' + (λ² + ρ²) u = 0` (fast and uniformly accurate);
//! * pointwise, by quadrature of the Harish-Chandra K-integral in its
//!   Mehler–Dirichlet substituted form, which stays accurate at large
//!   radius where the raw circle quadrature loses digits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::group::GroupId;
use crate::{Error, GroupElement, Result, RHO};

/// Plancherel density of H² in the curvature −1 normalization,
/// without the κ factor. Even in λ.
pub fn plancherel_density(lambda: f64) -> f64 {
    let l = lambda.abs();
    l * (std::f64::consts::PI * l).tanh()
}

/// Composite Simpson weights for `n` (odd) uniformly spaced nodes.
pub(crate) fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson rule needs an odd node count");
    let mut w = vec![h / 3.0; n];
    for (i, wi) in w.iter_mut().enumerate().take(n - 1).skip(1) {
        *wi = if i % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
    }
    w
}

// ---------------------------------------------------------------------------
// radial eigenfunction propagation
// ---------------------------------------------------------------------------

/// Series start for the radial equation near t = 0 (regular singular
/// point): u = 1 + a2 t² + a4 t⁴ + a6 t⁶ + a8 t⁸.
fn series_start(mu: f64, t: f64) -> (f64, f64) {
    let a2 = -mu / 4.0;
    let a4 = -a2 * (mu + 2.0 / 3.0) / 16.0;
    let a6 = (-(4.0 / 3.0) * a4 + (2.0 / 45.0) * a2 - mu * a4) / 36.0;
    let a8 = -(2.0 * a6 + mu * a6 - 4.0 * a4 / 45.0 + 4.0 * a2 / 945.0) / 64.0;
    let t2 = t * t;
    let u = 1.0 + t2 * (a2 + t2 * (a4 + t2 * (a6 + t2 * a8)));
    let v = t * (2.0 * a2 + t2 * (4.0 * a4 + t2 * (6.0 * a6 + t2 * 8.0 * a8)));
    (u, v)
}

const SERIES_T: f64 = 0.005;

/// Propagate `u'' + coth(t) u' + mu u = 0`, `u(0) = 1`, reading off values
/// at the ascending `targets` (first target may be 0).
fn propagate(mu: f64, targets: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(targets.len());
    let mut idx = 0;
    if !targets.is_empty() && targets[0] == 0.0 {
        out.push(1.0);
        idx = 1;
    }
    if idx >= targets.len() {
        return out;
    }
    // substep bound: resolve both the oscillation (λ h small) and coth
    let hs_max = (0.025 / mu.sqrt().max(1.0)).min(0.005);
    let mut t;
    let (mut u, mut v) = if targets[idx] <= 2.0 * SERIES_T {
        t = targets[idx];
        let (u, v) = series_start(mu, t);
        out.push(u);
        idx += 1;
        (u, v)
    } else {
        t = SERIES_T;
        series_start(mu, t)
    };
    while idx < targets.len() {
        let goal = targets[idx];
        let gap = goal - t;
        if gap > 0.0 {
            let n = (gap / hs_max).ceil().max(1.0) as usize;
            let hs = gap / n as f64;
            for k in 0..n {
                let tk = t + k as f64 * hs;
                let f = |tt: f64, u: f64, v: f64| (v, -tt.cosh() / tt.sinh() * v - mu * u);
                let (k1u, k1v) = f(tk, u, v);
                let (k2u, k2v) = f(tk + hs / 2.0, u + hs / 2.0 * k1u, v + hs / 2.0 * k1v);
                let (k3u, k3v) = f(tk + hs / 2.0, u + hs / 2.0 * k2u, v + hs / 2.0 * k2v);
                let (k4u, k4v) = f(tk + hs, u + hs * k3u, v + hs * k3v);
                u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                v += hs / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            }
            t = goal;
        }
        out.push(u);
        idx += 1;
    }
    out
}

/// φ values on a product grid: row-major `[t index][λ index]`.
/// `ts` must be ascending with `ts[0] ≥ 0`.
pub fn phi_matrix(ts: &[f64], lambdas: &[f64]) -> Vec<f64> {
    let nt = ts.len();
    let nl = lambdas.len();
    let cols: Vec<Vec<f64>> = lambdas
        .par_iter()
        .map(|&l| propagate(l * l + RHO * RHO, ts))
        .collect();
    let mut out = vec![0.0; nt * nl];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..nt {
            out[i * nl + j] = col[i];
        }
    }
    out
}

/// φ_λ(a_t) for all `lambdas` at one radius.
pub fn phi_column(t: f64, lambdas: &[f64]) -> Vec<f64> {
    lambdas
        .par_iter()
        .map(|&l| propagate(l * l + RHO * RHO, &[t])[0])
        .collect()
}

// ---------------------------------------------------------------------------
// pointwise spherical function
// ---------------------------------------------------------------------------

/// φ_λ at radial coordinate `t`, by Simpson quadrature of the K-integral
/// in the Mehler–Dirichlet substituted form
/// `φ_λ(a_t) = (√2/π) ∫_0^√t 2u cos(λ(t-u²)) / √(cosh t − cosh(t-u²)) du`.
///
/// The node count scales with `k_order` and with `λ·t` so the oscillation
/// is always resolved.
pub fn spherical_function_radial(lambda: f64, t: f64, k_order: usize) -> f64 {
    if t < 1e-14 {
        return 1.0;
    }
    let mut n = k_order.max((16.0 * (1.0 + lambda.abs() * t)).ceil() as usize);
    if n % 2 == 1 {
        n += 1;
    }
    let umax = t.sqrt();
    let h = umax / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let u = i as f64 * h;
        let integrand = if i == 0 {
            2.0 * (lambda * t).cos() / t.sinh().sqrt()
        } else {
            let s = t - u * u;
            2.0 * u * (lambda * s).cos() / (t.cosh() - s.cosh()).sqrt()
        };
        acc += w * integrand;
    }
    std::f64::consts::SQRT_2 / std::f64::consts::PI * acc * h / 3.0
}

/// Spherical function `φ_λ(g)` (SL2R only). Depends on `g` only through
/// its Cartan radial coordinate.
pub fn spherical_function(lambda: f64, g: &GroupElement, k_order: usize) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("non-finite λ".into()));
    }
    if g.group != GroupId::Sl2r {
        return Err(Error::UnsupportedGroup(g.group));
    }
    if k_order < 16 {
        return Err(Error::InvalidArgument("k_quadrature_order must be ≥ 16".into()));
    }
    Ok(spherical_function_radial(lambda, g.cartan_radial(), k_order))
}

/// Raw circle quadrature of the Harish-Chandra integral,
/// `(1/2π) ∮ e^{-(iλ+ρ) H(g⁻¹ k_θ)} dθ` with `H` read off the Iwasawa
/// decomposition. Loses accuracy for radii beyond a few units; kept as an
/// independent cross-check of [`spherical_function`].
pub fn spherical_function_k_quadrature(
    lambda: f64,
    g: &GroupElement,
    order: usize,
) -> Result<Complex64> {
    if g.group != GroupId::Sl2r {
        return Err(Error::UnsupportedGroup(g.group));
    }
    let ginv = g.inverse();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..order {
        let theta = (i as f64 + 0.5) / order as f64 * std::f64::consts::TAU;
        let k = GroupElement::rotation(theta);
        let h = ginv.multiply(&k)?.iwasawa()?.h;
        acc += Complex64::new(0.0, -lambda * h).exp() * (-RHO * h).exp();
    }
    Ok(acc / order as f64)
}

/// K-average `(1/2π) ∮ φ_λ(σ k τ) dk` by midpoint quadrature; the left
/// side of the spherical functional equation.
pub fn k_average(lambda: f64, sigma: &GroupElement, tau: &GroupElement, order: usize) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..order {
        let theta = (i as f64 + 0.5) / order as f64 * std::f64::consts::TAU;
        let k = GroupElement::rotation(theta);
        let g = sigma.multiply(&k)?.multiply(tau)?;
        acc += spherical_function(lambda, &g, 64)?;
    }
    Ok(acc / order as f64)
}

// ---------------------------------------------------------------------------
// grids and function containers
// ---------------------------------------------------------------------------

/// Discretization of `a* ≅ [0, Λ]`. `weights` are composite Simpson
/// weights already multiplied by the Plancherel density `κ λ tanh(πλ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub lambda_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho: f64,
    pub kappa: f64,
    pub k_quadrature_order: usize,
}

impl SpectralGrid {
    fn raw(lambda_max: f64, n_nodes: usize, k_order: usize) -> Self {
        let n = if n_nodes % 2 == 0 { n_nodes + 1 } else { n_nodes };
        let h = lambda_max / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let weights = simpson_weights(n, h)
            .iter()
            .zip(nodes.iter())
            .map(|(w, l)| w * plancherel_density(*l))
            .collect();
        SpectralGrid {
            lambda_max,
            nodes,
            weights,
            rho: RHO,
            kappa: 1.0,
            k_quadrature_order: k_order,
        }
    }
}

/// Uniform radial grid on `[0, T_max]` with Simpson quadrature weights
/// (volume density not included).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialGrid {
    pub t_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(t_max: f64, n_nodes: usize) -> Self {
        let n = if n_nodes % 2 == 0 { n_nodes + 1 } else { n_nodes };
        let h = t_max / (n - 1) as f64;
        RadialGrid {
            t_max,
            nodes: (0..n).map(|i| i as f64 * h).collect(),
            weights: simpson_weights(n, h),
        }
    }
}

/// A K-bi-invariant function sampled on a radial grid.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    pub grid: Arc<RadialGrid>,
    pub samples: Vec<f64>,
    pub compact_support: bool,
}

impl RadialFunction {
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64, compact_support: bool) -> Self {
        let samples = grid.nodes.iter().map(|&t| f(t)).collect();
        RadialFunction { grid, samples, compact_support }
    }

    /// C^∞ bump `exp(-1/(1-((t-center)/width)²))` on `|t-center| < width`.
    pub fn smooth_bump(grid: Arc<RadialGrid>, center: f64, width: f64) -> Self {
        Self::from_fn(
            grid,
            move |t| {
                let x = (t - center) / width;
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            },
            true,
        )
    }

    /// Value at arbitrary radius by linear interpolation, 0 beyond the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.grid.nodes.len();
        let h = self.grid.t_max / (n - 1) as f64;
        if t < 0.0 || t > self.grid.t_max {
            return 0.0;
        }
        let i = ((t / h) as usize).min(n - 2);
        let frac = (t - self.grid.nodes[i]) / h;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }
}

/// Spherical-transform values aligned with a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct SpectralVector {
    pub values: Vec<Complex64>,
}

impl SpectralVector {
    pub fn real(values: Vec<f64>) -> Self {
        SpectralVector { values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Result of a truncated spectral reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct Reconstruction {
    pub value: f64,
    pub tail_fraction: f64,
    pub truncation_warning: bool,
}

const TAIL_WARN_FRACTION: f64 = 1e-4;

// ---------------------------------------------------------------------------
// transform plan
// ---------------------------------------------------------------------------

/// Precomputed transform pair between a radial grid and a spectral grid:
/// holds φ on the product grid and the calibrated κ.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    pub grid: SpectralGrid,
    pub radial: Arc<RadialGrid>,
    /// φ_λj(a_ti), row-major `[i * n_lambda + j]`.
    phi: Vec<f64>,
}

/// Default λ grid: Λ = 40 with 2001 nodes (Simpson parity).
pub const DEFAULT_LAMBDA_MAX: f64 = 40.0;
pub const DEFAULT_N_LAMBDA: usize = 2001;
/// Default radial grid: T_max = 20 with 4001 nodes.
pub const DEFAULT_T_MAX: f64 = 20.0;
pub const DEFAULT_N_RADIAL: usize = 4001;
pub const DEFAULT_K_ORDER: usize = 256;

impl TransformPlan {
    pub fn new(
        lambda_max: f64,
        n_lambda: usize,
        t_max: f64,
        n_radial: usize,
        k_order: usize,
    ) -> Result<Self> {
        if lambda_max <= 0.0 || t_max <= 0.0 {
            return Err(Error::InvalidArgument("grid extents must be positive".into()));
        }
        let grid = SpectralGrid::raw(lambda_max, n_lambda, k_order);
        let radial = Arc::new(RadialGrid::new(t_max, n_radial));
        let phi = phi_matrix(&radial.nodes, &grid.nodes);
        let mut plan = TransformPlan { grid, radial, phi };
        // κ calibration: one scalar fixing inverse(transform(f_ref))(e) = f_ref(e)
        let width = 2.0f64.min(plan.radial.t_max / 2.0);
        let f_ref = RadialFunction::smooth_bump(plan.radial.clone(), 0.0, width);
        let fhat = plan.transform(&f_ref)?;
        let at_origin: f64 = fhat
            .values
            .iter()
            .zip(plan.grid.weights.iter())
            .map(|(v, w)| v.re * w)
            .sum();
        let kappa = f_ref.samples[0] / at_origin;
        for w in &mut plan.grid.weights {
            *w *= kappa;
        }
        plan.grid.kappa = kappa;
        Ok(plan)
    }

    /// The documented default grids.
    pub fn with_defaults() -> Result<Self> {
        Self::new(
            DEFAULT_LAMBDA_MAX,
            DEFAULT_N_LAMBDA,
            DEFAULT_T_MAX,
            DEFAULT_N_RADIAL,
            DEFAULT_K_ORDER,
        )
    }

    pub fn n_lambda(&self) -> usize {
        self.grid.nodes.len()
    }

    pub fn phi_at(&self, i_radial: usize, j_lambda: usize) -> f64 {
        self.phi[i_radial * self.n_lambda() + j_lambda]
    }

    /// Spherical transform `f̂(λ) = ∫_0^∞ f(t) φ_λ(a_t) sinh t dt`.
    pub fn transform(&self, f: &RadialFunction) -> Result<SpectralVector> {
        if !f.compact_support {
            return Err(Error::InvalidArgument(
                "spherical transform requires compact support".into(),
            ));
        }
        if f.samples.len() != self.radial.nodes.len() {
            return Err(Error::InvalidArgument("radial grid mismatch".into()));
        }
        let nl = self.n_lambda();
        let weighted: Vec<f64> = f
            .samples
            .iter()
            .zip(self.radial.nodes.iter())
            .zip(self.radial.weights.iter())
            .map(|((v, t), w)| v * t.sinh() * w)
            .collect();
        let values: Vec<Complex64> = (0..nl)
            .into_par_iter()
            .map(|j| {
                let mut acc = 0.0;
                for (i, wv) in weighted.iter().enumerate() {
                    acc += wv * self.phi[i * nl + j];
                }
                Complex64::new(acc, 0.0)
            })
            .collect();
        Ok(SpectralVector { values })
    }

    fn tail_fraction(&self, fhat: &SpectralVector) -> f64 {
        let n = fhat.values.len();
        let cut = n - n / 10;
        let total: f64 = fhat
            .values
            .iter()
            .zip(self.grid.weights.iter())
            .map(|(v, w)| v.norm() * w)
            .sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = fhat.values[cut..]
            .iter()
            .zip(self.grid.weights[cut..].iter())
            .map(|(v, w)| v.norm() * w)
            .sum();
        tail / total
    }

    /// Inverse transform at one radial coordinate.
    pub fn inverse_at_radius(&self, fhat: &SpectralVector, t: f64) -> Result<Reconstruction> {
        if fhat.values.len() != self.n_lambda() {
            return Err(Error::InvalidArgument("spectral grid mismatch".into()));
        }
        let col = phi_column(t, &self.grid.nodes);
        let value: f64 = fhat
            .values
            .iter()
            .zip(self.grid.weights.iter())
            .zip(col.iter())
            .map(|((v, w), p)| v.re * w * p)
            .sum();
        let tail = self.tail_fraction(fhat);
        Ok(Reconstruction { value, tail_fraction: tail, truncation_warning: tail > TAIL_WARN_FRACTION })
    }

    /// Inverse transform at a group element.
    pub fn inverse_transform(&self, fhat: &SpectralVector, g: &GroupElement) -> Result<Reconstruction> {
        if g.group != GroupId::Sl2r {
            return Err(Error::UnsupportedGroup(g.group));
        }
        self.inverse_at_radius(fhat, g.cartan_radial())
    }

    /// Inverse transform sampled on the whole radial grid, with an optional
    /// spectral multiplier applied node-wise.
    pub fn inverse_samples(
        &self,
        fhat: &SpectralVector,
        multiplier: Option<&[Complex64]>,
    ) -> Result<RadialFunction> {
        if fhat.values.len() != self.n_lambda() {
            return Err(Error::InvalidArgument("spectral grid mismatch".into()));
        }
        let nl = self.n_lambda();
        let coeff: Vec<f64> = (0..nl)
            .map(|j| {
                let m = multiplier.map_or(Complex64::new(1.0, 0.0), |m| m[j]);
                (fhat.values[j] * m).re * self.grid.weights[j]
            })
            .collect();
        let samples: Vec<f64> = (0..self.radial.nodes.len())
            .into_par_iter()
            .map(|i| {
                let row = &self.phi[i * nl..(i + 1) * nl];
                row.iter().zip(coeff.iter()).map(|(p, c)| p * c).sum()
            })
            .collect();
        Ok(RadialFunction { grid: self.radial.clone(), samples, compact_support: false })
    }

    /// Inner product `⟨f, g⟩ = ∫ f g sinh t dt` on the radial grid; the
    /// single normalization authority for G-integrals.
    pub fn inner_product(&self, f: &RadialFunction, g: &RadialFunction) -> f64 {
        f.samples
            .iter()
            .zip(g.samples.iter())
            .zip(self.radial.nodes.iter())
            .zip(self.radial.weights.iter())
            .map(|(((a, b), t), w)| a * b * t.sinh() * w)
            .sum()
    }

    /// Spectral inner product `⟨f̂, ĝ⟩_ω` (real part).
    pub fn spectral_inner(&self, fhat: &SpectralVector, ghat: &SpectralVector) -> f64 {
        fhat.values
            .iter()
            .zip(ghat.values.iter())
            .zip(self.grid.weights.iter())
            .map(|((a, b), w)| (a * b.conj()).re * w)
            .sum()
    }

    /// Both sides of the Parseval identity `⟨f, g⟩ = ⟨f̂, ĝ⟩_ω`.
    pub fn parseval(&self, f: &RadialFunction, g: &RadialFunction) -> Result<(f64, f64)> {
        let lhs = self.inner_product(f, g);
        let rhs = self.spectral_inner(&self.transform(f)?, &self.transform(g)?);
        Ok((lhs, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_element, Element};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    /// Shared coarse plan for unit tests; the acceptance suite exercises
    /// the documented defaults.
    pub(crate) fn test_plan() -> &'static TransformPlan {
        static PLAN: OnceLock<TransformPlan> = OnceLock::new();
        PLAN.get_or_init(|| TransformPlan::new(30.0, 1201, 15.0, 2401, 256).unwrap())
    }

    #[test]
    fn spherical_function_identity_is_one() {
        let e = Element::identity(GroupId::Sl2r);
        for lam in [0.0, 0.5, 3.0, 20.0] {
            assert!((spherical_function(lam, &e, 64).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(spherical_function(f64::NAN, &e, 64).is_err());
        assert!(spherical_function(1.0, &Element::identity(GroupId::Su2), 64).is_err());
        assert!(spherical_function(1.0, &e, 8).is_err());
    }

    /// Frozen conical-function values, computed independently with mpmath
    /// (legenp(-1/2 + iλ, 0, cosh t), 50 digits).
    #[test]
    fn spherical_function_matches_conical_reference() {
        let cases = [
            (0.5, 1.0, 0.8835378988482238),
            (2.0, 0.5, 0.7539907784597135),
            (5.0, 3.0, -0.005890318626939236),
            (0.0, 2.0, 0.795651695605974),
            (10.0, 8.0, -0.005153823980026029),
            (40.0, 5.0, -0.00404248799228187),
        ];
        for (lam, t, expect) in cases {
            let got = spherical_function_radial(lam, t, 256);
            assert!(
                (got - expect).abs() < 1e-8,
                "φ_{lam}({t}) = {got}, want {expect}"
            );
        }
    }

    #[test]
    fn ode_table_agrees_with_pointwise_values() {
        let ts: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let lams = [0.0, 0.7, 3.0, 12.0];
        let m = phi_matrix(&ts, &lams);
        for (i, &t) in ts.iter().enumerate().step_by(17) {
            for (j, &l) in lams.iter().enumerate() {
                let reference = spherical_function_radial(l, t, 512);
                assert!(
                    (m[i * lams.len() + j] - reference).abs() < 1e-8,
                    "t={t} λ={l}: {} vs {}",
                    m[i * lams.len() + j],
                    reference
                );
            }
        }
    }

    #[test]
    fn k_quadrature_cross_check_small_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_element(GroupId::Sl2r, 2.0, &mut rng);
            let lam = rng.gen_range(0.0..4.0);
            let a = spherical_function(lam, &g, 256).unwrap();
            let b = spherical_function_k_quadrature(lam, &g, 512).unwrap();
            assert!((a - b.re).abs() < 1e-6, "K-integral mismatch {} vs {}", a, b.re);
            assert!(b.im.abs() < 1e-8);
        }
    }

    #[test]
    fn positive_definite_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let g = random_element(GroupId::Sl2r, 8.0, &mut rng);
            let lam = rng.gen_range(0.0..20.0);
            let v = spherical_function(lam, &g, 128).unwrap();
            assert!(v.abs() <= 1.0 + 1e-9, "|φ_{lam}| = {v} at t={}", g.cartan_radial());
        }
    }

    #[test]
    fn functional_equation_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let s = random_element(GroupId::Sl2r, 5.0, &mut rng);
            let t = random_element(GroupId::Sl2r, 5.0, &mut rng);
            let lam = rng.gen_range(0.0..5.0);
            let lhs = k_average(lam, &s, &t, 256).unwrap();
            let rhs = spherical_function(lam, &s, 256).unwrap()
                * spherical_function(lam, &t, 256).unwrap();
            assert!((lhs - rhs).abs() < 1e-6);
        }
    }

    #[test]
    fn kappa_close_to_one() {
        let plan = test_plan();
        assert!((plan.grid.kappa - 1.0).abs() < 1e-3, "κ = {}", plan.grid.kappa);
    }

    #[test]
    fn transform_linearity_and_zero() {
        let plan = test_plan();
        let zero = RadialFunction::from_fn(plan.radial.clone(), |_| 0.0, true);
        let zhat = plan.transform(&zero).unwrap();
        assert!(zhat.values.iter().all(|v| v.norm() == 0.0));

        let f = RadialFunction::smooth_bump(plan.radial.clone(), 2.0, 1.0);
        let g = RadialFunction::smooth_bump(plan.radial.clone(), 3.0, 1.5);
        let comb = RadialFunction {
            grid: plan.radial.clone(),
            samples: f
                .samples
                .iter()
                .zip(g.samples.iter())
                .map(|(a, b)| 2.5 * a - 0.7 * b)
                .collect(),
            compact_support: true,
        };
        let fh = plan.transform(&f).unwrap();
        let gh = plan.transform(&g).unwrap();
        let ch = plan.transform(&comb).unwrap();
        for j in 0..plan.n_lambda() {
            let lin = 2.5 * fh.values[j].re - 0.7 * gh.values[j].re;
            assert!((ch.values[j].re - lin).abs() < 1e-10);
        }
        // real symmetric input stays real
        assert!(fh.max_imag() <= 1e-8);
    }

    #[test]
    fn narrow_bump_transform_approaches_phi() {
        // brute-force limit oracle: unit-mass bump shrinking onto t0 = 1,
        // on a fine dedicated radial grid; checked at moderate λ
        let t0 = 1.0;
        let lams: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let phi_ref: Vec<f64> =
            lams.iter().map(|&l| spherical_function_radial(l, t0, 512)).collect();
        let mut prev_err = f64::INFINITY;
        for width in [0.2, 0.1, 0.05] {
            let grid = Arc::new(RadialGrid::new(2.0, 8001));
            let bump = RadialFunction::smooth_bump(grid.clone(), t0, width);
            let mass: f64 = bump
                .samples
                .iter()
                .zip(grid.nodes.iter())
                .zip(grid.weights.iter())
                .map(|((v, t), w)| v * t.sinh() * w)
                .sum();
            let phim = phi_matrix(&grid.nodes, &lams);
            let err = lams
                .iter()
                .enumerate()
                .map(|(j, _)| {
                    let fhat: f64 = bump
                        .samples
                        .iter()
                        .zip(grid.nodes.iter())
                        .zip(grid.weights.iter())
                        .enumerate()
                        .map(|(i, ((v, t), w))| v * t.sinh() * w * phim[i * lams.len() + j])
                        .sum();
                    (fhat / mass - phi_ref[j]).abs()
                })
                .fold(0.0, f64::max);
            assert!(err < prev_err, "bump limit not improving: {err} vs {prev_err}");
            prev_err = err;
        }
        assert!(prev_err < 1e-3, "narrow-bump limit error {prev_err}");
    }

    #[test]
    fn inversion_round_trip() {
        let plan = test_plan();
        let f = RadialFunction::smooth_bump(plan.radial.clone(), 2.0, 1.5);
        let fh = plan.transform(&f).unwrap();
        let rec = plan.inverse_samples(&fh, None).unwrap();
        let sup = f
            .samples
            .iter()
            .zip(rec.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "round-trip sup error {sup}");

        // zero spectral data inverts to zero
        let zero = SpectralVector::real(vec![0.0; plan.n_lambda()]);
        assert_eq!(plan.inverse_at_radius(&zero, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn lambda_refinement_stability() {
        let coarse = test_plan();
        let fine = TransformPlan::new(60.0, 2401, 15.0, 2401, 256).unwrap();
        let f = RadialFunction::smooth_bump(coarse.radial.clone(), 2.0, 2.0);
        let r1 = coarse
            .inverse_samples(&coarse.transform(&f).unwrap(), None)
            .unwrap();
        let r2 = fine.inverse_samples(&fine.transform(&f).unwrap(), None).unwrap();
        let delta = r1
            .samples
            .iter()
            .zip(r2.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // the coarse test window [0, 30] leaves a larger spectral tail
        // than the documented default; the full-size grids are held to
        // 1e-4 in the acceptance suite
        assert!(delta < 1e-3, "Λ-refinement delta {delta}");
    }

    #[test]
    fn plancherel_density_shape() {
        assert_eq!(plancherel_density(0.0), 0.0);
        assert_eq!(plancherel_density(-2.0), plancherel_density(2.0));
        // |c(λ)|^{-2} ~ λ^{2p} with 2p = dim N = 1 ⇒ density/λ² bounded
        for lam in [10.0, 100.0, 1000.0] {
            assert!(plancherel_density(lam) / (lam * lam) <= 1.0 + 1e-12);
            assert!(plancherel_density(lam) / (lam * lam) >= 0.9 / lam);
        }
    }

    #[test]
    fn plancherel_and_parseval_identities() {
        let plan = test_plan();
        let f = RadialFunction::smooth_bump(plan.radial.clone(), 2.0, 1.5);
        let (lhs, rhs) = plan.parseval(&f, &f).unwrap();
        assert!((lhs - rhs).abs() / lhs < 1e-3, "Plancherel rel err {}", (lhs - rhs).abs() / lhs);

        let zero = RadialFunction::from_fn(plan.radial.clone(), |_| 0.0, true);
        let (l0, r0) = plan.parseval(&f, &zero).unwrap();
        assert_eq!(l0, 0.0);
        assert!(r0.abs() < 1e-12);

        // disjoint supports: lhs exactly 0, rhs only quadrature noise
        let g = RadialFunction::smooth_bump(plan.radial.clone(), 6.0, 1.0);
        let (ld, rd) = plan.parseval(&f, &g).unwrap();
        assert_eq!(ld, 0.0);
        let scale = plan.inner_product(&f, &f).sqrt() * plan.inner_product(&g, &g).sqrt();
        assert!(rd.abs() <= 1e-3 * scale);
    }

    #[test]
    fn paley_wiener_decay_witness() {
        let plan = test_plan();
        let f = RadialFunction::smooth_bump(plan.radial.clone(), 2.0, 1.5);
        let fh = plan.transform(&f).unwrap();
        for n in [2i32, 4] {
            let sup = fh
                .values
                .iter()
                .zip(plan.grid.nodes.iter())
                .map(|(v, l)| v.norm() * (1.0 + l).powi(n))
                .fold(0.0, f64::max);
            assert!(sup.is_finite() && sup < 1e4, "PW witness N={n}: {sup}");
        }
    }

    #[test]
    fn depends_only_on_radial_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let g = random_element(GroupId::Sl2r, 6.0, &mut rng);
            let t = g.cartan_radial();
            let via_g = spherical_function(1.3, &g, 256).unwrap();
            let via_t = spherical_function_radial(1.3, t, 256);
            assert!((via_g - via_t).abs() < 1e-12);
        }
    }
}
