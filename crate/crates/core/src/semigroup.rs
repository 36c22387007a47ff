//! Fourier-side evaluation of the Markov semigroup and its potential
//! theory: `T_t`, the generator, Dirichlet form, Green energy and the
//! harmonic transience integral.
//!
//! Everything here is a spectral multiplier: `(T_t f)^ = e^{-t η} f̂`,
//! `(A f)^ = -η f̂`, `E(f, g) = ⟨η f̂, ĝ⟩_ω`, Green energy
//! `⟨f̂/η, f̂⟩_ω`. Quadrature truncation and refinement behaviour are
//! surfaced in [`EnergyReport`] instead of being silently absorbed.

use num_complex::Complex64;

use crate::exponent::ExponentTable;
use crate::spherical::{
    plancherel_density, simpson_weights, Reconstruction, RadialFunction, SpectralVector,
    TransformPlan,
};
use crate::{Error, GroupElement, Result};

fn check_alignment(plan: &TransformPlan, table: &ExponentTable, fhat: &SpectralVector) -> Result<()> {
    if table.lambdas.len() != plan.n_lambda() || fhat.values.len() != plan.n_lambda() {
        return Err(Error::InvalidArgument("spectral grid mismatch".into()));
    }
    Ok(())
}

fn heat_multiplier(table: &ExponentTable, time: f64) -> Result<Vec<Complex64>> {
    if !(time >= 0.0 && time.is_finite()) {
        return Err(Error::InvalidArgument("time must be non-negative".into()));
    }
    Ok(table.eta.iter().map(|&e| (-e * time).exp()).collect())
}

/// `(T_t f)(g)` from the transform of `f`.
pub fn apply_semigroup(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    time: f64,
    g: &GroupElement,
) -> Result<Reconstruction> {
    check_alignment(plan, table, fhat)?;
    let m = heat_multiplier(table, time)?;
    let mult = SpectralVector {
        values: fhat.values.iter().zip(m.iter()).map(|(v, m)| v * m).collect(),
    };
    plan.inverse_transform(&mult, g)
}

/// `T_t f` sampled on the radial grid.
pub fn semigroup_samples(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    time: f64,
) -> Result<RadialFunction> {
    check_alignment(plan, table, fhat)?;
    let m = heat_multiplier(table, time)?;
    plan.inverse_samples(fhat, Some(&m))
}

/// Generator `A f` sampled on the radial grid (`(A f)^ = -η f̂`).
pub fn generator_samples(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
) -> Result<RadialFunction> {
    check_alignment(plan, table, fhat)?;
    let m: Vec<Complex64> = table.eta.iter().map(|&e| -e).collect();
    plan.inverse_samples(fhat, Some(&m))
}

/// `⟨T_t f, g⟩` evaluated spectrally.
pub fn parseval_semigroup(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    ghat: &SpectralVector,
    time: f64,
) -> Result<f64> {
    check_alignment(plan, table, fhat)?;
    if ghat.values.len() != plan.n_lambda() {
        return Err(Error::InvalidArgument("spectral grid mismatch".into()));
    }
    let m = heat_multiplier(table, time)?;
    Ok(fhat
        .values
        .iter()
        .zip(ghat.values.iter())
        .zip(m.iter())
        .zip(plan.grid.weights.iter())
        .map(|(((f, g), m), w)| (f * m * g.conj()).re * w)
        .sum())
}

/// Dirichlet form `E(f, g) = ⟨η f̂, ĝ⟩_ω`; defined for symmetric
/// semigroups only.
pub fn dirichlet_form(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    ghat: &SpectralVector,
    symmetric: bool,
) -> Result<f64> {
    if !symmetric {
        return Err(Error::RequiresSymmetric);
    }
    check_alignment(plan, table, fhat)?;
    if ghat.values.len() != plan.n_lambda() {
        return Err(Error::InvalidArgument("spectral grid mismatch".into()));
    }
    Ok(fhat
        .values
        .iter()
        .zip(ghat.values.iter())
        .zip(table.eta.iter())
        .zip(plan.grid.weights.iter())
        .map(|(((f, g), e), w)| (f * e * g.conj()).re * w)
        .sum())
}

/// Numerical verdict on an energy-type integral.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyReport {
    pub value: f64,
    /// Estimated mass beyond the quadrature horizon.
    pub tail_estimate: f64,
    /// Change under mesh refinement (finest minus next level).
    pub grid_refinement_delta: f64,
    pub divergent: bool,
}

/// Green energy `∫_0^∞ ⟨T_t f, f⟩ dt = ⟨f̂ / η, f̂⟩_ω`.
///
/// `horizon` only enters the reported tail estimate (the spectral value
/// already integrates time exactly).
pub fn green_energy(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    horizon: f64,
) -> Result<EnergyReport> {
    check_alignment(plan, table, fhat)?;
    let terms: Vec<f64> = fhat
        .values
        .iter()
        .zip(table.eta.iter())
        .zip(plan.grid.weights.iter())
        .map(|((f, e), w)| {
            if e.re <= 0.0 {
                if f.norm_sqr() * w == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                f.norm_sqr() / e.re * w
            }
        })
        .collect();
    let value: f64 = terms.iter().sum();
    let tail_estimate: f64 = fhat
        .values
        .iter()
        .zip(table.eta.iter())
        .zip(plan.grid.weights.iter())
        .map(|((f, e), w)| {
            if e.re <= 0.0 {
                0.0
            } else {
                f.norm_sqr() * (-horizon * e.re).exp() / e.re * w
            }
        })
        .sum();
    // refinement: drop to every other λ node (Simpson reweight)
    let coarse: f64 = {
        let idx: Vec<usize> = (0..plan.n_lambda()).step_by(2).collect();
        let h = (plan.grid.nodes[idx[1]] - plan.grid.nodes[idx[0]]).abs();
        let w = simpson_weights(idx.len(), h);
        idx.iter()
            .zip(w.iter())
            .map(|(&j, wj)| {
                let e = table.eta[j].re;
                if e <= 0.0 {
                    0.0
                } else {
                    fhat.values[j].norm_sqr() / e
                        * wj
                        * plan.grid.kappa
                        * plancherel_density(plan.grid.nodes[j])
                }
            })
            .sum()
    };
    let divergent = !value.is_finite();
    Ok(EnergyReport {
        value,
        tail_estimate,
        grid_refinement_delta: if divergent { f64::INFINITY } else { (value - coarse).abs() },
        divergent,
    })
}

/// Green energy by explicit time quadrature of `⟨T_t f, f⟩` over
/// `[0, t_max]` (Simpson) plus the exact spectral tail beyond `t_max`.
/// Independent of the `1/η` shortcut; used for cross-checks.
pub fn green_energy_time_domain(
    plan: &TransformPlan,
    table: &ExponentTable,
    fhat: &SpectralVector,
    t_max: f64,
    n_time: usize,
) -> Result<f64> {
    check_alignment(plan, table, fhat)?;
    let n = if n_time % 2 == 0 { n_time + 1 } else { n_time };
    let h = t_max / (n - 1) as f64;
    let w = simpson_weights(n, h);
    let mut acc = 0.0;
    for (i, wi) in w.iter().enumerate() {
        acc += wi * parseval_semigroup(plan, table, fhat, fhat, i as f64 * h)?;
    }
    let tail: f64 = fhat
        .values
        .iter()
        .zip(table.eta.iter())
        .zip(plan.grid.weights.iter())
        .map(|((f, e), wt)| {
            if e.re <= 0.0 {
                0.0
            } else {
                f.norm_sqr() * (-t_max * e.re).exp() / e.re * wt
            }
        })
        .sum();
    Ok(acc + tail)
}

const DIVERGENCE_CAP: f64 = 1e12;

/// Harmonic-analytic transience integral `∫_{[0, Λ₀]} ω(dλ) / Re η_λ`
/// with the Plancherel measure ω, evaluated on three nested meshes.
///
/// Finite and refinement-stable values support transience; a divergence
/// flag is raised when the integrand blows up near λ = 0 or the
/// refinement deltas stop shrinking.
pub fn harmonic_transience_integral(
    plan: &TransformPlan,
    table: &ExponentTable,
    lambda0: f64,
) -> Result<EnergyReport> {
    if table.lambdas.len() != plan.n_lambda() {
        return Err(Error::InvalidArgument("spectral grid mismatch".into()));
    }
    if !(lambda0 > 0.0 && lambda0 <= plan.grid.lambda_max) {
        return Err(Error::InvalidArgument("Λ₀ must lie inside the spectral window".into()));
    }
    // integrand on the full grid, restricted to [0, Λ₀]
    let mut last = 0usize;
    for (j, &l) in plan.grid.nodes.iter().enumerate() {
        if l <= lambda0 {
            last = j;
        }
    }
    // all three refinement meshes must span the same window, so the
    // interval count has to be divisible by 4
    last -= last % 4;
    if last < 8 {
        return Err(Error::InvalidArgument("Λ₀ window too small for the grid".into()));
    }
    let integrand = |j: usize| -> f64 {
        let e = table.eta[j].re;
        let dens = plan.grid.kappa * plancherel_density(plan.grid.nodes[j]);
        if e <= 0.0 {
            if dens == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            dens / e
        }
    };
    let max_integrand = (0..=last).map(integrand).fold(0.0, f64::max);

    // three nested Simpson meshes: step 1, 2, 4 over the same window
    let level = |step: usize| -> f64 {
        let idx: Vec<usize> = (0..=last).step_by(step).collect();
        let h = plan.grid.nodes[idx[1]] - plan.grid.nodes[idx[0]];
        let w = simpson_weights(idx.len(), h);
        idx.iter().zip(w.iter()).map(|(&j, wj)| wj * integrand(j)).sum()
    };
    let fine = level(1);
    let mid = level(2);
    let coarse = level(4);
    let delta_fine = (fine - mid).abs();
    let delta_coarse = (mid - coarse).abs();
    let divergent = !fine.is_finite()
        || max_integrand > DIVERGENCE_CAP
        || (delta_fine > 1e-10 && delta_fine > 0.5 * delta_coarse + 1e-12);
    Ok(EnergyReport {
        value: fine,
        tail_estimate: 0.0,
        grid_refinement_delta: delta_fine,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{exponent_table, ProcessParams, RadialLevyMeasure};
    use crate::group::GroupId;
    use crate::spherical::TransformPlan;
    use std::sync::OnceLock;

    fn plan() -> &'static TransformPlan {
        static PLAN: OnceLock<TransformPlan> = OnceLock::new();
        PLAN.get_or_init(|| TransformPlan::new(30.0, 1201, 15.0, 2401, 64).unwrap())
    }

    fn diffusion(a: f64) -> ProcessParams {
        ProcessParams { group: GroupId::Sl2r, a, levy: RadialLevyMeasure::Zero, symmetric: true }
    }

    fn bump_hat() -> (RadialFunction, SpectralVector) {
        let f = RadialFunction::smooth_bump(plan().radial.clone(), 2.0, 1.5);
        let fhat = plan().transform(&f).unwrap();
        (f, fhat)
    }

    #[test]
    fn time_zero_is_identity() {
        let p = plan();
        let table = exponent_table(&diffusion(1.0), &p.grid).unwrap();
        let (f, fhat) = bump_hat();
        let t0 = semigroup_samples(p, &table, &fhat, 0.0).unwrap();
        let sup = f
            .samples
            .iter()
            .zip(t0.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "T_0 deviation {sup}");
        assert!(semigroup_samples(p, &table, &fhat, -1.0).is_err());
    }

    #[test]
    fn semigroup_property_and_contraction() {
        let p = plan();
        let table = exponent_table(&diffusion(0.8), &p.grid).unwrap();
        let (_, fhat) = bump_hat();
        let one_step = semigroup_samples(p, &table, &fhat, 0.7).unwrap();
        let half = semigroup_samples(p, &table, &fhat, 0.35).unwrap();
        // T_{0.35} applied twice: transform of half is e^{-0.35η} f̂ exactly
        let half_hat = SpectralVector {
            values: fhat
                .values
                .iter()
                .zip(table.eta.iter())
                .map(|(v, e)| v * (-e * 0.35).exp())
                .collect(),
        };
        let two_step = semigroup_samples(p, &table, &half_hat, 0.35).unwrap();
        let sup = one_step
            .samples
            .iter()
            .zip(two_step.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-10, "semigroup property violated by {sup}");
        drop(half);

        // L² contraction
        let n0 = p.spectral_inner(&fhat, &fhat);
        let n1: f64 = half_hat
            .values
            .iter()
            .zip(p.grid.weights.iter())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum();
        assert!(n1 <= n0 * (1.0 + 1e-12));
    }

    #[test]
    fn generator_matches_difference_quotient() {
        let p = plan();
        let table = exponent_table(&diffusion(1.0), &p.grid).unwrap();
        let (_f, fhat) = bump_hat();
        let af = generator_samples(p, &table, &fhat).unwrap();
        // Baseline is the reconstructed f so the (h-independent) inversion
        // bias cancels inside the quotient instead of being divided by h.
        let f0 = p.inverse_samples(&fhat, None).unwrap();
        // Richardson-extrapolated forward quotient (T_h f - f)/h
        let quotient = |h: f64| -> Vec<f64> {
            let th = semigroup_samples(p, &table, &fhat, h).unwrap();
            th.samples
                .iter()
                .zip(f0.samples.iter())
                .map(|(a, b)| (a - b) / h)
                .collect()
        };
        // h must be small against 1/η over the whole spectral window
        let d1 = quotient(1e-5);
        let d2 = quotient(5e-6);
        let mut sup = 0.0f64;
        for i in 0..af.samples.len() {
            let richardson = 2.0 * d2[i] - d1[i];
            sup = sup.max((richardson - af.samples[i]).abs());
        }
        assert!(sup < 1e-3, "generator mismatch {sup}");
    }

    #[test]
    fn parseval_semigroup_decays() {
        let p = plan();
        let table = exponent_table(&diffusion(1.0), &p.grid).unwrap();
        let (_, fhat) = bump_hat();
        let v0 = parseval_semigroup(p, &table, &fhat, &fhat, 0.0).unwrap();
        let v1 = parseval_semigroup(p, &table, &fhat, &fhat, 1.0).unwrap();
        let v2 = parseval_semigroup(p, &table, &fhat, &fhat, 2.0).unwrap();
        assert!(v0 > v1 && v1 > v2 && v2 > 0.0);
        // η ≥ a ρ² forces at least e^{-t/4} decay at a = 1
        assert!(v1 <= v0 * (-0.25f64).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn dirichlet_form_positive_and_symmetric_only() {
        let p = plan();
        let params = diffusion(0.5);
        let table = exponent_table(&params, &p.grid).unwrap();
        let (_, fhat) = bump_hat();
        let e = dirichlet_form(p, &table, &fhat, &fhat, true).unwrap();
        assert!(e > 0.0);
        assert!(matches!(
            dirichlet_form(p, &table, &fhat, &fhat, false),
            Err(Error::RequiresSymmetric)
        ));
        // scaling: E(cf, cf) = c² E(f, f)
        let scaled = SpectralVector { values: fhat.values.iter().map(|v| v * 3.0).collect() };
        let e9 = dirichlet_form(p, &table, &scaled, &scaled, true).unwrap();
        assert!((e9 - 9.0 * e).abs() < 1e-9 * e9.abs().max(1.0));
    }

    #[test]
    fn green_energy_spectral_vs_time_domain() {
        let p = plan();
        let table = exponent_table(&diffusion(1.0), &p.grid).unwrap();
        let (_, fhat) = bump_hat();
        let report = green_energy(p, &table, &fhat, 50.0).unwrap();
        assert!(!report.divergent);
        assert!(report.tail_estimate < 1e-6 * report.value);
        let td = green_energy_time_domain(p, &table, &fhat, 40.0, 4001).unwrap();
        let rel = (report.value - td).abs() / report.value;
        assert!(rel < 1e-3, "green energy mismatch {rel}");
        assert!(report.grid_refinement_delta < 1e-3 * report.value);
    }

    #[test]
    fn green_energy_divergence_flag_for_degenerate_exponent() {
        let p = plan();
        let table = exponent_table(&diffusion(0.0), &p.grid).unwrap();
        let (_, fhat) = bump_hat();
        let report = green_energy(p, &table, &fhat, 10.0).unwrap();
        assert!(report.divergent);
        assert!(!report.value.is_finite());
    }

    #[test]
    fn harmonic_integral_finite_and_stable_for_diffusion() {
        let p = plan();
        let table = exponent_table(&diffusion(1.0), &p.grid).unwrap();
        let report = harmonic_transience_integral(p, &table, 1.0).unwrap();
        assert!(!report.divergent, "delta {}", report.grid_refinement_delta);
        assert!(report.value.is_finite() && report.value > 0.0);
        // oracle: ∫_0^1 λ tanh(πλ) / (λ²+1/4) dλ by independent fine trapezoid
        let n = 400000usize;
        let h = 1.0 / n as f64;
        let mut oracle = 0.0;
        for i in 0..=n {
            let l = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            oracle += w * l * (std::f64::consts::PI * l).tanh() / (l * l + 0.25);
        }
        oracle *= h * p.grid.kappa;
        assert!((report.value - oracle).abs() < 1e-5, "{} vs {oracle}", report.value);
    }

    #[test]
    fn harmonic_integral_flags_degenerate_divergence() {
        let p = plan();
        let table = exponent_table(&diffusion(0.0), &p.grid).unwrap();
        let report = harmonic_transience_integral(p, &table, 1.0).unwrap();
        assert!(report.divergent);
        assert!(harmonic_transience_integral(p, &table, -1.0).is_err());
        assert!(harmonic_transience_integral(p, &table, 1e9).is_err());
    }
}
