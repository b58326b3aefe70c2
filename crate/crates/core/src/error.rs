//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures surfaced by simulation, spectral evaluation, and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LongMemError {
    /// A scalar parameter lies outside its admissible range.
    #[error("parameter {name} = {value} violates {constraint}")]
    Parameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Spectral quantities diverge at the origin and are not defined there.
    #[error("spectral density is undefined at lambda = 0")]
    ZeroFrequency,

    /// Requested autocovariance lag does not fit inside the series.
    #[error("lag {lag} out of range for a series of length {len}")]
    LagOutOfRange { lag: usize, len: usize },

    /// The operation needs a longer series than the one supplied.
    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    /// Constant input: every spectral ordinate is zero and no fit exists.
    #[error("degenerate series: sample variance is zero")]
    DegenerateSeries,

    /// Explicit moving-average truncation misses too much variance.
    #[error(
        "truncation length m = {m} keeps less than the required share of the \
         moving-average variance for d = {d} (need m >= {required})"
    )]
    Truncation { m: usize, required: usize, d: f64 },

    /// Circulant embedding produced negative eigenvalues and the dense
    /// fallback is unavailable at this length.
    #[error(
        "circulant embedding failed at n = {n} (most negative eigenvalue \
         {min_eigenvalue:.3e}) and no dense fallback applies"
    )]
    EmbeddingFailure { n: usize, min_eigenvalue: f64 },

    /// A user-supplied spectral weight returned NaN or infinity.
    #[error("weight function returned a non-finite value at lambda = {lambda}")]
    WeightEvaluation { lambda: f64 },

    /// Finite-difference derivative failed its internal stability check.
    #[error(
        "finite-difference derivative unstable: Richardson disagreement \
         {disagreement:.3e} exceeds {limit:.1e}"
    )]
    DerivativeInstability { disagreement: f64, limit: f64 },

    /// Local Whittle bandwidth outside its admissible range.
    #[error("bandwidth m = {m} invalid for length {n}: {reason}")]
    Bandwidth {
        m: usize,
        n: usize,
        reason: &'static str,
    },

    /// A Monte Carlo run configuration file could not be parsed.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// Kernel density estimation needs spread in the sample.
    #[error("degenerate sample: all {len} values are equal")]
    DegenerateSample { len: usize },
}
