//! Simulation and parametric Whittle estimation for long-memory increment
//! processes.
//!
//! The crate covers the increment sequences of two self-similar processes
//! with Hurst index `H` in `(1/2, 1)` and scale `C`: the Rosenblatt process
//! (a non-Gaussian second-order Hermite limit) and fractional Brownian
//! motion. Both share the covariance
//!
//! ```text
//! r(t) = (C^2 / 2) * (|t+1|^{2H} + |t-1|^{2H} - 2|t|^{2H})
//! ```
//!
//! and therefore the same spectral density, so a single frequency-domain
//! toolkit serves both:
//!
//! * [`spectral`] — exact covariance, spectral density, the normalized
//!   density with unit log-integral used by the Whittle objective, and the
//!   limit-theorem constants,
//! * [`simulate`] — seeded path generators (FARIMA, fractional Gaussian
//!   noise, Rosenblatt increments via Hermite block sums),
//! * [`periodogram`] — half-frequency periodogram grid and weighted
//!   integrals,
//! * [`estimators`] — Whittle and local Whittle estimation of `(H, C)`,
//! * [`experiments`] — Monte Carlo harness, summary tables, kernel density
//!   estimates, and convergence-rate diagnostics.

pub mod error;
pub mod estimators;
pub mod experiments;
mod fft;
pub mod periodogram;
mod quad;
pub mod simulate;
pub mod spectral;
mod stats;

pub use error::LongMemError;
pub use estimators::{
    estimate_local_whittle, estimate_whittle, estimate_whittle_with, LocalWhittleFit,
    WhittleEvaluator, WhittleFit, WhittleOptions,
};
pub use experiments::{kde_silverman, run_monte_carlo, KdeEstimate, McConfig, McReport};
pub use simulate::{SeedSpec, TimeSeries};
pub use spectral::{LongMemoryParams, SpectralConfig, SpectralModel};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LongMemError>;
