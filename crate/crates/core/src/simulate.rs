//! Seeded path generators for the processes the estimators target.
//!
//! All generators draw from a counter-based stream cipher RNG: a master
//! seed fixes the experiment, a stream index selects a statistically
//! independent substream, and the same `(seed, stream)` pair always
//! reproduces the same path byte for byte, whether paths are generated
//! serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::LongMemError;
use crate::fft;
use crate::Result;

/// Hard ceiling on the FARIMA moving-average truncation length.
pub const FARIMA_TRUNCATION_CAP: usize = 1 << 20;

/// Relative share of moving-average variance the truncation may discard.
const FARIMA_VARIANCE_TOLERANCE: f64 = 1e-3;

/// Master seed plus stream index identifying one reproducible noise stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// RNG positioned at the start of this stream.
    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// What produced a series, stored alongside the values for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProcessKind {
    Farima {
        d: f64,
        truncation: usize,
    },
    FractionalGaussianNoise {
        h: f64,
    },
    RosenblattIncrements {
        h: f64,
        c: f64,
        inner_length: usize,
        farima_truncation: usize,
    },
    /// Values supplied by the caller rather than a generator.
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub kind: ProcessKind,
    pub seed: Option<SeedSpec>,
}

/// A finite, at least two-point sample path with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    meta: SeriesMeta,
}

impl TimeSeries {
    /// Wraps externally produced values (e.g. read from a file).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::with_meta(
            values,
            SeriesMeta {
                kind: ProcessKind::External,
                seed: None,
            },
        )
    }

    fn with_meta(values: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if values.len() < 2 {
            return Err(LongMemError::SeriesTooShort {
                len: values.len(),
                min: 2,
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(LongMemError::Parameter {
                name: "values",
                value: *bad,
                constraint: "all values finite",
            });
        }
        Ok(Self { values, meta })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }
}

fn validate_d(d: f64) -> Result<()> {
    if !(d > 0.0 && d < 0.5) {
        return Err(LongMemError::Parameter {
            name: "d",
            value: d,
            constraint: "0 < d < 1/2",
        });
    }
    Ok(())
}

/// Moving-average coefficients of FARIMA(0, d, 0):
/// `psi_0 = 1`, `psi_j = psi_{j-1} (j - 1 + d) / j`.
pub fn farima_ma_coefficients(d: f64, m: usize) -> Result<Vec<f64>> {
    validate_d(d)?;
    let mut psi = Vec::with_capacity(m + 1);
    psi.push(1.0);
    for j in 1..=m {
        let j_f = j as f64;
        let prev = psi[j - 1];
        psi.push(prev * (j_f - 1.0 + d) / j_f);
    }
    Ok(psi)
}

/// Autocorrelations `rho_d(0..=max_lag)` of FARIMA(0, d, 0):
/// `rho(1) = d / (1 - d)`, `rho(k) = rho(k-1) (k - 1 + d) / (k - d)`.
pub fn farima_autocorrelation(d: f64, max_lag: usize) -> Result<Vec<f64>> {
    validate_d(d)?;
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for k in 1..=max_lag {
        let k_f = k as f64;
        let prev = rho[k - 1];
        rho.push(prev * (k_f - 1.0 + d) / (k_f - d));
    }
    Ok(rho)
}

/// Smallest truncation length whose discarded tail holds less than the
/// crate-wide share (1e-3) of the total moving-average variance, capped at
/// [`FARIMA_TRUNCATION_CAP`].
///
/// The tail is sized by `psi_j ~ j^{d-1} / Gamma(d)`, giving
/// `sum_{j>m} psi_j^2 ~ m^{2d-1} / ((1-2d) Gamma(d)^2)` against the exact
/// total `Gamma(1-2d) / Gamma(1-d)^2`. Near `d = 1/2` the requirement
/// explodes past any practical length, which is exactly what the cap is
/// for; the achieved deficit is still recorded in the series metadata via
/// the truncation actually used.
pub fn farima_truncation_length(d: f64) -> Result<usize> {
    validate_d(d)?;
    let g_d = gamma(d);
    let total = gamma(1.0 - 2.0 * d) / gamma(1.0 - d).powi(2);
    let inner = FARIMA_VARIANCE_TOLERANCE * (1.0 - 2.0 * d) * g_d * g_d * total;
    let required = inner.powf(-1.0 / (1.0 - 2.0 * d));
    if !required.is_finite() || required >= FARIMA_TRUNCATION_CAP as f64 {
        return Ok(FARIMA_TRUNCATION_CAP);
    }
    Ok((required.ceil() as usize).max(8))
}

fn standard_normals(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Shared FARIMA core: unit-variance truncated moving average of white
/// noise, `x_t = s^{-1} sum_{j<=m} psi_j eps_{t-j}` with `s^2 = sum psi_j^2`.
fn farima_path(d: f64, n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let psi = farima_ma_coefficients(d, m).expect("d validated by callers");
    let scale = 1.0 / psi.iter().map(|p| p * p).sum::<f64>().sqrt();
    let noise = standard_normals(n + m, rng);
    let full = fft::fft_convolve_full(&noise, &psi);
    full[m..m + n].iter().map(|x| x * scale).collect()
}

/// Simulates `n` points of FARIMA(0, d, 0), normalized to unit variance
/// under the truncated model.
///
/// `truncation = None` selects the shortest admissible length
/// automatically; an explicit length below that requirement is rejected
/// rather than silently under-resolving the long memory.
pub fn simulate_farima(
    d: f64,
    n: usize,
    truncation: Option<usize>,
    seed: &SeedSpec,
) -> Result<TimeSeries> {
    validate_d(d)?;
    if n < 2 {
        return Err(LongMemError::SeriesTooShort { len: n, min: 2 });
    }
    let required = farima_truncation_length(d)?;
    let m = match truncation {
        None => required,
        Some(m) if m < required => {
            return Err(LongMemError::Truncation { m, required, d });
        }
        Some(m) => m,
    };
    let mut rng = seed.rng();
    let values = farima_path(d, n, m, &mut rng);
    TimeSeries::with_meta(
        values,
        SeriesMeta {
            kind: ProcessKind::Farima { d, truncation: m },
            seed: Some(*seed),
        },
    )
}

/// Covariance of fractional Gaussian noise with unit scale, valid on the
/// full Hurst range `(0, 1)` the sampler accepts.
fn fgn_autocovariance(h: f64, lag: usize) -> f64 {
    let t = lag as f64;
    let two_h = 2.0 * h;
    0.5 * ((t + 1.0).powf(two_h) + (t - 1.0).abs().powf(two_h) - 2.0 * t.powf(two_h))
}

/// Largest series the dense Cholesky fallback will factor.
const CHOLESKY_FALLBACK_MAX: usize = 2048;

/// Relative tolerance on negative circulant eigenvalues before the
/// embedding is declared invalid.
const EMBEDDING_EIGEN_TOLERANCE: f64 = 1e-8;

/// Simulates fractional Gaussian noise, `0 < h < 1`, by circulant
/// embedding of the covariance; falls back to a dense Cholesky factor for
/// short series should the embedding produce materially negative
/// eigenvalues.
pub fn simulate_fgn(h: f64, n: usize, seed: &SeedSpec) -> Result<TimeSeries> {
    if !(h > 0.0 && h < 1.0) {
        return Err(LongMemError::Parameter {
            name: "h",
            value: h,
            constraint: "0 < h < 1",
        });
    }
    if n < 2 {
        return Err(LongMemError::SeriesTooShort { len: n, min: 2 });
    }
    let mut rng = seed.rng();
    let values = match fgn_circulant(h, n, &mut rng) {
        Ok(values) => values,
        Err(err) => {
            if n <= CHOLESKY_FALLBACK_MAX {
                // Redraw from the stream start so the fallback is as
                // reproducible as the main path.
                let mut rng = seed.rng();
                cholesky_sample(|lag| fgn_autocovariance(h, lag), n, &mut rng)?
            } else {
                return Err(err);
            }
        }
    };
    TimeSeries::with_meta(
        values,
        SeriesMeta {
            kind: ProcessKind::FractionalGaussianNoise { h },
            seed: Some(*seed),
        },
    )
}

/// Circulant (Davies-Harte) sampler: embeds the length-`n` covariance in a
/// `2n` circulant, whose FFT gives the exact spectral weights.
fn fgn_circulant(h: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let len = 2 * n;
    let mut circ = vec![Complex::new(0.0, 0.0); len];
    for lag in 0..=n {
        circ[lag].re = fgn_autocovariance(h, lag);
    }
    for lag in 1..n {
        circ[len - lag].re = circ[lag].re;
    }
    fft::fft_forward_inplace(&mut circ);

    let mut max_eig = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for c in &circ {
        max_eig = max_eig.max(c.re);
        min_eig = min_eig.min(c.re);
    }
    if min_eig < -EMBEDDING_EIGEN_TOLERANCE * max_eig {
        return Err(LongMemError::EmbeddingFailure {
            n,
            min_eigenvalue: min_eig,
        });
    }

    // Gaussian weights in a fixed draw order: the two real bins first,
    // then (re, im) pairs for k = 1..n.
    let g0: f64 = StandardNormal.sample(rng);
    let gn: f64 = StandardNormal.sample(rng);
    let mut spectrum = vec![Complex::new(0.0, 0.0); len];
    spectrum[0] = Complex::new((circ[0].re.max(0.0) / len as f64).sqrt() * g0, 0.0);
    spectrum[n] = Complex::new((circ[n].re.max(0.0) / len as f64).sqrt() * gn, 0.0);
    for k in 1..n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let w = (circ[k].re.max(0.0) / (2.0 * len as f64)).sqrt();
        spectrum[k] = Complex::new(w * re, w * im);
        spectrum[len - k] = spectrum[k].conj();
    }
    fft::fft_forward_inplace(&mut spectrum);
    Ok(spectrum[..n].iter().map(|c| c.re).collect())
}

/// Dense sampler from a stationary covariance via an in-place Cholesky
/// factor; quadratic storage limits it to short series.
fn cholesky_sample(
    cov: impl Fn(usize) -> f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = cov(i - j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(LongMemError::EmbeddingFailure {
                        n,
                        min_eigenvalue: sum,
                    });
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    let g = standard_normals(n, rng);
    Ok((0..n)
        .map(|i| (0..=i).map(|k| l[i * n + k] * g[k]).sum())
        .collect())
}

/// Variance `sigma_n^2 = n^{-2H} * 2 sum_{|k|<n} (n - |k|) rho_d(k)^2` of the
/// normalized Hermite block sums, with `d = H/2`.
fn hermite_block_variance(h: f64, inner_length: usize) -> f64 {
    let d = 0.5 * h;
    let rho = farima_autocorrelation(d, inner_length - 1).expect("d in (1/4, 1/2)");
    let n = inner_length as f64;
    let mut sum = n; // k = 0 term: (n - 0) * rho(0)^2
    for (k, r) in rho.iter().enumerate().skip(1) {
        sum += 2.0 * (n - k as f64) * r * r;
    }
    n.powf(-2.0 * h) * 2.0 * sum
}

/// Simulates the increment sequence of a Rosenblatt process with Hurst
/// index `h` and scale `c` by second-order Hermite block sums.
///
/// One continuous FARIMA(0, H/2, 0) stream `X` of length `n * inner_length`
/// is squared and centered, and consecutive blocks of `inner_length` terms
/// are summed:
///
/// ```text
/// Y_j = c sigma_n^{-1} n^{-H} sum_{i in block j} (X_i^2 - 1),
/// ```
///
/// where `sigma_n` makes `Var(Y_j) = c^2` exact in the pre-limit model.
/// Larger `inner_length` brings the blocks closer to the limit law at
/// linear cost in the underlying Gaussian length.
pub fn simulate_rosenblatt_increments(
    h: f64,
    n: usize,
    inner_length: usize,
    c: f64,
    seed: &SeedSpec,
) -> Result<TimeSeries> {
    let params = crate::spectral::LongMemoryParams::new(h, c)?;
    if n < 2 {
        return Err(LongMemError::SeriesTooShort { len: n, min: 2 });
    }
    if inner_length < 2 {
        return Err(LongMemError::Parameter {
            name: "inner_length",
            value: inner_length as f64,
            constraint: "inner_length >= 2",
        });
    }
    let d = 0.5 * h;
    let m = farima_truncation_length(d)?;
    let mut rng = seed.rng();
    let x = farima_path(d, n * inner_length, m, &mut rng);

    let sigma_n = hermite_block_variance(h, inner_length).sqrt();
    let block_scale = params.c() / (sigma_n * (inner_length as f64).powf(h));
    let values: Vec<f64> = x
        .chunks_exact(inner_length)
        .map(|block| {
            let sum_sq: f64 = block.iter().map(|v| v * v).sum();
            block_scale * (sum_sq - inner_length as f64)
        })
        .collect();
    TimeSeries::with_meta(
        values,
        SeriesMeta {
            kind: ProcessKind::RosenblattIncrements {
                h,
                c,
                inner_length,
                farima_truncation: m,
            },
            seed: Some(*seed),
        },
    )
}
