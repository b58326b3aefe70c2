//! Periodogram of an increment sample on the half-frequency grid
//! `lambda_k = pi k / N`, `k = 1..N`, the grid the Whittle objective sums
//! over.
//!
//! The ordinates come from one zero-padded length-`2N` DFT, so bin `k` of
//! the transform is exactly `sum_t y_t exp(-i pi k t / N)`; even bins
//! `k = 2j` coincide with the ordinary Fourier frequencies `2 pi j / N`
//! used by the local Whittle estimator.

use crate::error::LongMemError;
use crate::fft;
use crate::Result;

use std::f64::consts::PI;

/// Periodogram ordinates `I(pi k / N) = |sum_t y_t e^{-i pi k t / N}|^2 /
/// (2 pi N)` for `k = 1..N`, optionally of the mean-corrected series.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramGrid {
    n: usize,
    mean_corrected: bool,
    frequencies: Vec<f64>,
    ordinates: Vec<f64>,
}

impl PeriodogramGrid {
    /// Sample length `N` (also the number of grid points).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean_corrected(&self) -> bool {
        self.mean_corrected
    }

    /// Grid frequencies `pi k / N`, `k = 1..N`.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Ordinates aligned with [`Self::frequencies`].
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    /// Ordinate at the Fourier frequency `2 pi j / N` (grid index `2j`),
    /// defined for `1 <= j <= N/2`.
    pub fn fourier_ordinate(&self, j: usize) -> Option<f64> {
        if j == 0 || 2 * j > self.n {
            None
        } else {
            Some(self.ordinates[2 * j - 1])
        }
    }
}

/// Sample autocovariance `(1/N) sum_{j=1}^{N-|k|} y_j y_{j+|k|}` without
/// mean correction, matching the periodogram's own Fourier coefficients.
pub fn sample_autocovariance(values: &[f64], lag: usize) -> Result<f64> {
    let n = values.len();
    if lag >= n {
        return Err(LongMemError::LagOutOfRange { lag, len: n });
    }
    let sum: f64 = values
        .iter()
        .zip(&values[lag..])
        .map(|(a, b)| a * b)
        .sum();
    Ok(sum / n as f64)
}

/// Periodogram of `values` on the half-frequency grid, mean-correcting the
/// series first when `mean_correct` is set (the form every estimator here
/// consumes).
pub fn periodogram_grid(values: &[f64], mean_correct: bool) -> Result<PeriodogramGrid> {
    let n = values.len();
    if n < 2 {
        return Err(LongMemError::SeriesTooShort { len: n, min: 2 });
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(LongMemError::Parameter {
            name: "values",
            value: *bad,
            constraint: "all values finite",
        });
    }
    let centered: Vec<f64>;
    let input: &[f64] = if mean_correct {
        let mean = values.iter().sum::<f64>() / n as f64;
        centered = values.iter().map(|v| v - mean).collect();
        &centered
    } else {
        values
    };

    let spectrum = fft::dft_forward_padded(input, 2 * n);
    let scale = 1.0 / (2.0 * PI * n as f64);
    let ordinates: Vec<f64> = spectrum[1..=n].iter().map(|c| c.norm_sqr() * scale).collect();
    let frequencies: Vec<f64> = (1..=n).map(|k| PI * k as f64 / n as f64).collect();
    Ok(PeriodogramGrid {
        n,
        mean_corrected: mean_correct,
        frequencies,
        ordinates,
    })
}

/// Riemann approximation `(2 pi / N) sum_k w(lambda_k) I(lambda_k)` of the
/// integral `int_{-pi}^{pi} w I`, using the evenness of both factors.
pub fn integrated_periodogram(
    grid: &PeriodogramGrid,
    mut weight: impl FnMut(f64) -> f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for (&lambda, &ordinate) in grid.frequencies.iter().zip(&grid.ordinates) {
        let w = weight(lambda);
        if !w.is_finite() {
            return Err(LongMemError::WeightEvaluation { lambda });
        }
        acc += w * ordinate;
    }
    Ok(acc * 2.0 * PI / grid.n as f64)
}
