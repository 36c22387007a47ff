//! Recurrence/transience classification.
//!
//! Two evidence channels feed the verdict:
//!
//! * **probabilistic** — Monte Carlo occupation times of a ball around
//!   the base point at horizons T, 2T, 4T. A slope significantly above
//!   zero says the walk keeps returning; a vanishing occupation gain
//!   between 2T and 4T says it has left for good.
//! * **harmonic** — finiteness and refinement stability of
//!   `∫_{[0,Λ₀]} ω(dλ) / Re η_λ`, which holds exactly when the process
//!   is transient. For non-symmetric inputs the integral is evaluated
//!   for the symmetrized process (exponent `2 Re η`), whose transience
//!   is equivalent.
//!
//! The channels are computed independently and their agreement is
//! reported, never assumed. The harmonic channel can only ever support
//! transience on a finite grid, so recurrence claims rest on the
//! probabilistic channel (and, for the compact instance, on compactness
//! itself).

use serde::Serialize;

use crate::exponent::{exponent_table, ExponentTable};
use crate::group::{transporter, GroupId, Point};
use crate::semigroup::{harmonic_transience_integral, EnergyReport};
use crate::simulate::{potential_estimate, OccupationStats, SimConfig};
use crate::spherical::{RadialFunction, TransformPlan};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Recurrent,
    Transient,
    Inconclusive,
    /// No diffusion and no jumps: the constant process, classified before
    /// any statistics are attempted.
    Degenerate,
}

/// Decision thresholds; defaults are part of the published interface and
/// are echoed in every verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    /// z-score the occupation slope must exceed to call recurrence.
    pub recurrent_z: f64,
    /// Multiple of the standard error below which the 2T→4T occupation
    /// gain counts as zero (transience).
    pub transient_se: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { recurrent_z: 3.0, transient_se: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbabilisticEvidence {
    pub stats: OccupationStats,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarmonicEvidence {
    pub lambda0: f64,
    pub report: EnergyReport,
    /// True when the integral was taken for the symmetrized process.
    pub symmetrized: bool,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub classification: Classification,
    pub probabilistic: Option<ProbabilisticEvidence>,
    pub harmonic: Option<HarmonicEvidence>,
    /// True when both channels ran and reached the same class.
    pub agreement: Option<bool>,
    pub thresholds: Thresholds,
    pub notes: Vec<String>,
}

/// Classify occupation statistics alone.
pub fn classify_occupation(stats: &OccupationStats, th: &Thresholds) -> Classification {
    if stats.last_increment_mean <= th.transient_se * stats.last_increment_se {
        Classification::Transient
    } else if stats.slope_mean > th.recurrent_z * stats.slope_se {
        Classification::Recurrent
    } else {
        Classification::Inconclusive
    }
}

/// Classify a harmonic-integral report alone. A finite, refinement-stable
/// value supports transience; anything else is inconclusive (the finite
/// grid can never certify divergence).
pub fn classify_harmonic(report: &EnergyReport) -> Classification {
    if !report.divergent && report.value.is_finite() {
        Classification::Transient
    } else {
        Classification::Inconclusive
    }
}

fn combine(p: Classification, h: Classification) -> (Classification, bool) {
    let agree = p == h;
    let overall = match (p, h) {
        _ if agree => p,
        (Classification::Inconclusive, other) => other,
        (other, Classification::Inconclusive) => other,
        // genuine disagreement between the channels
        _ => Classification::Inconclusive,
    };
    (overall, agree)
}

/// Full classification of the process described by `sim`.
///
/// `plan` enables the harmonic channel (SL2R only); `lambda0` is the
/// upper end of the low-frequency window.
pub fn classify(
    sim: &SimConfig,
    plan: Option<&TransformPlan>,
    lambda0: f64,
    thresholds: Thresholds,
) -> Result<Verdict> {
    sim.validate()?;
    let params = &sim.params;
    let mut notes = Vec::new();
    if params.is_degenerate() {
        notes.push("no diffusion and no jumps: the path is constant".into());
        return Ok(Verdict {
            classification: Classification::Degenerate,
            probabilistic: None,
            harmonic: None,
            agreement: None,
            thresholds,
            notes,
        });
    }

    let stats = potential_estimate(sim)?;
    let p_class = classify_occupation(&stats, &thresholds);
    let probabilistic = Some(ProbabilisticEvidence { stats, classification: p_class });

    let harmonic = match (params.group, plan) {
        (GroupId::Sl2r, Some(plan)) => {
            let (spectral_params, symmetrized) = if params.symmetric {
                (params.clone(), false)
            } else {
                notes.push(
                    "non-symmetric input: harmonic integral taken for the symmetrized process (exponent 2 Re η), whose transience is equivalent".into(),
                );
                (params.symmetrize(), true)
            };
            let table = exponent_table(&spectral_params, &plan.grid)?;
            let report = harmonic_transience_integral(plan, &table, lambda0)?;
            let h_class = classify_harmonic(&report);
            Some(HarmonicEvidence { lambda0, report, symmetrized, classification: h_class })
        }
        _ => {
            if params.group == GroupId::Su2 {
                notes.push(
                    "compact group: every non-degenerate bi-invariant process is recurrent; only the probabilistic channel runs".into(),
                );
            }
            None
        }
    };

    let (classification, agreement) = match &harmonic {
        Some(h) => {
            let (c, a) = combine(p_class, h.classification);
            if !a {
                notes.push(format!(
                    "channel disagreement: probabilistic {:?}, harmonic {:?}",
                    p_class, h.classification
                ));
            }
            (c, Some(a))
        }
        None => (p_class, None),
    };

    Ok(Verdict { classification, probabilistic, harmonic, agreement, thresholds, notes })
}

/// Potential of a union of balls `⋃ B(c_i, radius)` evaluated at the base
/// point: `Σ_i (U f)(c_i)` with `f` a bump of the given width and
/// `U = ∫_0^∞ T_t dt` the potential operator. Well defined only for
/// transient processes; a recurrent classification yields an error.
pub fn compact_set_potential(
    plan: &TransformPlan,
    table: &ExponentTable,
    classification: Classification,
    centers: &[Point<f64>],
    radius: f64,
) -> Result<f64> {
    if classification == Classification::Recurrent {
        return Err(Error::NotApplicable(
            "potential of a compact set is infinite for a recurrent process".into(),
        ));
    }
    if table.min_re_eta() <= 0.0 {
        return Err(Error::NotApplicable("exponent vanishes on the grid".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("ball radius must be positive".into()));
    }
    let f = RadialFunction::smooth_bump(plan.radial.clone(), 0.0, radius);
    let fhat = plan.transform(&f)?;
    let multiplier: Vec<num_complex::Complex64> = table.eta.iter().map(|e| e.inv()).collect();
    let potential = plan.inverse_samples(&fhat, Some(&multiplier))?;
    let base = crate::group::base_point::<f64>(GroupId::Sl2r);
    let mut acc = 0.0;
    for c in centers {
        if c.group != GroupId::Sl2r {
            return Err(Error::UnsupportedGroup(c.group));
        }
        // bi-invariance: (U f)(c) depends only on d(o, c), realized by the
        // transporter from the base point to the center
        let d = transporter(&base, c)?.cartan_radial();
        acc += potential.eval(d);
    }
    Ok(acc)
}
