//! Adaptive Haar-wavelet goodness-of-fit tests for bivariate copula densities.
//!
//! The crate is organised bottom-up:
//!
//! - [`wavelet`]: Haar scaling functions on dyadic grids of the unit square
//!   and the admissible level window.
//! - [`copula`]: the parametric families, their CDFs, densities, samplers,
//!   Kendall-tau maps and exact scaling coefficients.
//! - [`empirical`]: sample splitting and rank pseudo-observations.
//! - [`ustat`]: binned U-statistics and their minimum over a parameter grid.
//! - [`gof`]: the adaptive test, its thresholds and the two-sample variant.
//! - [`experiments`]: Monte-Carlo power studies, estimators and I/O.

// NaN-rejecting `!(x > 0.0)` checks and full-precision quadrature tables are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod copula;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod gof;
pub mod parallel;
pub mod report;
pub mod rng;
pub mod special;
pub mod ustat;
pub mod wavelet;

pub use error::{Error, Result};
