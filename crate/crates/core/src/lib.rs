//! Finite-scale spectral asymptotics.
//!
//! The crate computes the quantities that decide whether an operator (seen
//! only through its eigenvalue sequence, its distribution function, or the
//! decay of a heat semigroup) carries a singular trace and which spectral
//! dimension it has:
//!
//! - [`stepfn`]: exact non-increasing step functions, rearrangements and
//!   distribution functions.
//! - [`orders`]: polynomial orders at 0 and at infinity (liminf of log-log
//!   ratios on dyadic grids), directly and through the distribution function.
//! - [`eccentricity`]: the doubling ratios `S(2t)/S(t)` and the cluster-at-one
//!   test behind eccentric operators.
//! - [`specdim`]: eigenvalue models (power laws, power-log laws, the
//!   two-scale plateau sequence, flat-torus spectra) with box and Hausdorff
//!   dimensions, Dixmier trajectories and regularity tests.
//! - [`heat`]: lattice return probabilities, semigroup asymptotic dimension,
//!   Novikov-Shubin exponents, spectral counting and kernel norm identities.
//! - [`oracle`]: independent brute-force reference computations.
//!
//! Scalar-generic pieces are parameterised over [`Scalar`]; the aliases below
//! fix the usual precisions.

pub mod eccentricity;
pub mod error;
pub mod heat;
pub mod io;
pub mod logsum;
pub mod oracle;
pub mod orders;
pub mod scalar;
pub mod specdim;
pub mod stepfn;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision step function, the default representation everywhere.
pub type StepFn = stepfn::StepFunction<f64>;
/// Single-precision step function.
pub type StepFn32 = stepfn::StepFunction<f32>;
/// Double-precision finite measure sample.
pub type Sample = stepfn::MassSample<f64>;
/// Single-precision finite measure sample.
pub type Sample32 = stepfn::MassSample<f32>;
/// Double-precision finite kernel.
pub type Kernel = heat::FiniteKernel<f64>;
