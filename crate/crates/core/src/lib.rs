//! Spectral factorization `f = |s|²` of nonnegative band-limited almost
//! periodic functions.
//!
//! Functions are finite trigonometric sums `Σ c_ω e^{iωx}` whose frequencies
//! are exact elements of `ℚ(√2, √3, …)` ([`ap_core::ExactFrequency`]), so
//! spectra, bandwidths and ℚ-independence are decided exactly while
//! coefficients stay in `f64`.
//!
//! Three factorization routes are provided:
//!
//! * [`periodic_factor`]: Fejér–Riesz via polynomial roots, for commensurable spectra;
//! * [`cepstral_factor`]: the outer-function route `h = exp(½ log f + i·v)` with `v`
//!   the conjugate function of `½ log f`, valid for any `f ≥ m > 0`;
//! * [`entire_products`]: selecting one zero from each conjugate pair of a
//!   prescribed zero set.
//!
//! [`counterexample`] builds a strictly positive band-limited `f` with
//! divergent Fourier series whose spectral factor is still band-limited, and
//! [`verify`] holds the numeric identity checks shared by all of them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ap_core;
pub mod cepstral_factor;
pub mod counterexample;
pub mod entire_products;
pub mod periodic_factor;
pub mod quadrature;
pub mod verify;

use thiserror::Error;

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid too coarse: step·τ = {0:.3e} must be < 1 (refine the grid)")]
    GridTooCoarse(f64),
    #[error("spectrum is not commensurable")]
    IncommensurableSpectrum,
    #[error("function is not real-valued")]
    NotRealValued,
    #[error("root finding did not converge: {0}")]
    RootNonConvergence(String),
    #[error("function is not nonnegative: {0}")]
    NotNonnegative(String),
    #[error("no certified positive lower bound: {0}")]
    NotBoundedBelow(String),
    #[error("window too small for the requested translates")]
    WindowTooSmall,
    #[error("real zero at {0} has odd multiplicity")]
    OddRealMultiplicity(f64),
    #[error("zero set is not closed under conjugation")]
    NotConjugateSymmetric,
    #[error("oracle index too small: block {block} needs sup-norm ≤ {target:.4e}, best reachable {best:.4e}")]
    OracleTooSmall { block: usize, target: f64, best: f64 },
    #[error("dilated spectra collide")]
    SpectraCollision,
    #[error("reciprocal approximation failed: boundary error {0:.3e}")]
    ReciprocalApproximationFailed(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
