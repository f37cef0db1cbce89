//! Confidence distributions: sample-dependent distribution estimators on a parameter
//! space, the constructors that produce them (pivots, p-value functions, likelihoods,
//! bootstrap), a combiner for meta-analysis, and simulation-based inversion engines
//! (bootstrap, fiducial argmin, ABC) with randomness-matching diagnostics.
//!
//! Layering:
//! - [`statkit`]: distribution laws, special functions, seeded RNG streams, numerics.
//!   Generic over the scalar type; see the `f64` aliases below.
//! - [`cd`]: the `ConfDist` object and derived inference (intervals, p-values,
//!   confidence curves, CD-random-variable draws), plus discrete upper/lower pairs.
//! - [`build`]: constructors for the worked examples (normal mean, paired-variance,
//!   binomial, gamma shape profile, Mann-Whitney shift, Fisher-Z correlation, BCa
//!   bootstrap, normalized likelihood).
//! - [`combine`]: the combined CD for k independent studies.
//! - [`invert`]: structural-model engines producing data-conditional draws and the
//!   matching diagnostic comparing them with the sampling distribution.
//! - [`harness`]: the coverage studies, validity suites, and report serialization
//!   behind the CLI.

pub mod build;
pub mod cd;
pub mod combine;
pub mod error;
pub mod harness;
pub mod invert;
pub mod statkit;

pub use cd::{Alternative, ConfDist, Interval};
pub use error::{Error, Result};

/// Double-precision law, the instantiation every inference layer uses.
pub type Law = statkit::ScalarLaw<f64>;
/// Single-precision law, mainly for bulk plotting-density work.
pub type Law32 = statkit::ScalarLaw<f32>;

pub use statkit::RngStream;
