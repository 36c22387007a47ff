//! Bi-invariant Lévy processes on rank-one symmetric spaces.
//!
//! Two concrete instances ship: the hyperbolic plane `SL(2,R)/SO(2)`
//! (non-compact) and the compact group `SU(2)`. The crate provides
//!
//! * exact matrix/quaternion group arithmetic with Iwasawa and Cartan
//!   decompositions ([`group`]),
//! * numerical spherical functions, the spherical (Mehler–Fock type)
//!   transform and its Plancherel inversion ([`spherical`]),
//! * characteristic exponents of bi-invariant convolution semigroups from
//!   their diffusion coefficient and radial Lévy measure ([`exponent`]),
//! * Fourier-side evaluation of the Markov semigroup, generator, Dirichlet
//!   form, Green energy and the harmonic-transience integral ([`semigroup`]),
//! * seeded Monte Carlo path simulation with occupation-time statistics
//!   ([`simulate`]),
//! * a recurrence/transience classifier combining the probabilistic and
//!   harmonic evidence channels ([`classify`]).
//!
//! Core group arithmetic is generic over the scalar type through
//! [`Scalar`]; the concrete `f64` aliases used by the rest of the crate
//! are re-exported at the crate root.

pub mod classify;
pub mod config;
pub mod exponent;
pub mod group;
pub mod io;
pub mod presets;
pub mod semigroup;
pub mod simulate;
pub mod spherical;

use std::fmt::Debug;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Scalar type for the group kernel. `f64` everywhere downstream; `f32`
/// is supported for the pure group arithmetic.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}
impl Scalar for f32 {}
impl Scalar for f64 {}

/// Concrete `f64` group element.
pub type GroupElement = group::Element<f64>;
/// Concrete `f64` point of the symmetric space.
pub type Point = group::Point<f64>;
/// Concrete `f64` Iwasawa coordinates.
pub type IwasawaCoords = group::Iwasawa<f64>;

pub use classify::{Classification, Verdict};
pub use config::RunConfig;
pub use exponent::{ExponentTable, ProcessParams, RadialLevyMeasure};
pub use group::GroupId;
pub use semigroup::EnergyReport;
pub use simulate::{OccupationStats, PathRecord, SimConfig};
pub use spherical::{RadialFunction, SpectralGrid, SpectralVector, TransformPlan};

/// Half the sum of positive roots for the `SL(2,R)` instance, as a number
/// on `a*` in the curvature −1 normalization.
pub const RHO: f64 = 0.5;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("operands belong to different groups")]
    MixedGroups,
    #[error("operation not supported for group {0:?}")]
    UnsupportedGroup(GroupId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid Lévy measure: {0}")]
    MeasureInvalid(String),
    #[error("operation requires a symmetric semigroup")]
    RequiresSymmetric,
    #[error("spectral data decays too slowly: {0}")]
    DecayError(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
