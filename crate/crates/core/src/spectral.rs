//! Exact second-order theory of long-memory increment processes.
//!
//! The increment sequence of an `H`-self-similar process with stationary
//! increments and scale `C` (Rosenblatt process or fractional Brownian
//! motion alike) has covariance
//!
//! ```text
//! r(k) = (C^2 / 2) (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})
//! ```
//!
//! and spectral density
//!
//! ```text
//! f(lambda) = kappa(H) C^2 (1 - cos lambda) sum_k |lambda + 2 pi k|^{-1-2H},
//! kappa(H) = sin(pi H) Gamma(2H + 1) / pi,
//! ```
//!
//! the aliased form of the continuous-time density; `kappa` is fixed by
//! `int_R (1 - cos x) |x|^{-1-2H} dx = pi / (H Gamma(2H) sin(pi H))` so that
//! the density integrates to `r(0) = C^2` over `[-pi, pi]`.
//!
//! Whittle estimation works with the normalized density `g_H = a_H (1 -
//! cos lambda) sum_k |...|^{-1-2H}` whose log-normalizer `a_H` makes
//! `int log g_H = 0`; then `f = sigma^2 g_H` with `sigma^2 = kappa(H) C^2 /
//! a_H`, and the scale maps between `C^2` and `sigma^2` are multiplication
//! by `mu(H) = a_H / kappa(H)` or its inverse.
//!
//! The infinite alias sum is truncated at a configurable order `K` and the
//! discarded tail is restored by its integral comparison with
//! Euler-Maclaurin end corrections, which keeps the truncation error far
//! below the `K^{-2H}` of the bare integral bound.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::LongMemError;
use crate::quad;
use crate::Result;

use std::f64::consts::PI;

/// Hurst index `H` in `(1/2, 1)` and scale `C > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongMemoryParams {
    h: f64,
    c: f64,
}

impl LongMemoryParams {
    pub fn new(h: f64, c: f64) -> Result<Self> {
        validate_h(h)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(LongMemError::Parameter {
                name: "c",
                value: c,
                constraint: "c > 0 and finite",
            });
        }
        Ok(Self { h, c })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Numerical knobs for spectral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Alias-sum truncation order: the lattice sum keeps `|k| <= K`.
    pub truncation_order: usize,
    /// Geometric panel count for integrals over `[-pi, pi]`.
    pub quadrature_panels: usize,
    /// Step for finite-difference derivatives in `H`.
    pub fd_step: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            truncation_order: 200,
            quadrature_panels: 64,
            fd_step: 1e-3,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation_order < 10 {
            return Err(LongMemError::Parameter {
                name: "truncation_order",
                value: self.truncation_order as f64,
                constraint: "truncation_order >= 10",
            });
        }
        if self.quadrature_panels < 64 {
            return Err(LongMemError::Parameter {
                name: "quadrature_panels",
                value: self.quadrature_panels as f64,
                constraint: "quadrature_panels >= 64",
            });
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.01) {
            return Err(LongMemError::Parameter {
                name: "fd_step",
                value: self.fd_step,
                constraint: "0 < fd_step < 0.01",
            });
        }
        Ok(())
    }
}

fn validate_h(h: f64) -> Result<()> {
    if !(h > 0.5 && h < 1.0) {
        return Err(LongMemError::Parameter {
            name: "h",
            value: h,
            constraint: "1/2 < h < 1",
        });
    }
    Ok(())
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 {
        return Err(LongMemError::ZeroFrequency);
    }
    if !(lambda.abs() <= PI) {
        return Err(LongMemError::Parameter {
            name: "lambda",
            value: lambda,
            constraint: "|lambda| <= pi",
        });
    }
    Ok(())
}

/// Spectral prefactor `kappa(H) = sin(pi H) Gamma(2H + 1) / pi`.
pub(crate) fn kappa(h: f64) -> f64 {
    (PI * h).sin() * gamma(2.0 * h + 1.0) / PI
}

/// Covariance of the increment process at integer `lag`.
///
/// Large lags route through a binomial series in `1/|lag|`: the direct
/// second difference of `|t|^{2H}` cancels catastrophically once
/// `|lag|^{2H}` dwarfs the result.
pub fn autocovariance(params: &LongMemoryParams, lag: i64) -> f64 {
    let t = lag.unsigned_abs() as f64;
    let two_h = 2.0 * params.h;
    let c2 = params.c * params.c;
    if t <= 16.0 {
        return 0.5
            * c2
            * ((t + 1.0).powf(two_h) + (t - 1.0).abs().powf(two_h) - 2.0 * t.powf(two_h));
    }
    // (1+x)^{2H} + (1-x)^{2H} - 2 = 2 sum_{j>=1} binom(2H, 2j) x^{2j}, x = 1/t.
    let x2 = 1.0 / (t * t);
    let mut coeff = two_h * (two_h - 1.0) / 2.0; // binom(2H, 2)
    let mut term = coeff * x2;
    let mut sum = term;
    let mut j = 1;
    while term.abs() > 1e-17 * sum.abs() && j < 40 {
        // binom(2H, 2j+2) = binom(2H, 2j) (2H-2j)(2H-2j-1) / ((2j+1)(2j+2))
        let two_j = 2.0 * j as f64;
        coeff *= (two_h - two_j) * (two_h - two_j - 1.0) / ((two_j + 1.0) * (two_j + 2.0));
        term = coeff * x2.powi(j as i32 + 1);
        sum += term;
        j += 1;
    }
    c2 * t.powf(two_h) * sum
}

/// Alias lattice sum `sum_{|k| <= K} |lambda + 2 pi k|^{-1-2H}` plus the
/// Euler-Maclaurin completion of the discarded `|k| > K` tail.
fn lattice_sum(h: f64, lambda: f64, truncation_order: usize) -> f64 {
    let a = lambda.abs();
    let expo = -(1.0 + 2.0 * h);
    let mut sum = a.powf(expo);
    for k in 1..=truncation_order {
        let base = 2.0 * PI * k as f64;
        sum += (base + a).powf(expo) + (base - a).powf(expo);
    }
    let m = 2.0 * PI * (truncation_order + 1) as f64;
    sum + lattice_tail(h, m + a) + lattice_tail(h, m - a)
}

/// `sum_{k >= M} (2 pi k + s)^{-1-2H}` for `x = 2 pi M + s`, via the integral
/// comparison plus the first two Euler-Maclaurin corrections; the residual
/// is `O(K^{-4-2H})`.
fn lattice_tail(h: f64, x: f64) -> f64 {
    let integral = x.powf(-2.0 * h) / (4.0 * PI * h);
    let half_term = 0.5 * x.powf(-1.0 - 2.0 * h);
    let derivative_term = PI * (1.0 + 2.0 * h) * x.powf(-2.0 - 2.0 * h) / 6.0;
    integral + half_term + derivative_term
}

/// `(1 - cos lambda) sum_k |lambda + 2 pi k|^{-1-2H}`, the H-dependent shape
/// shared by the spectral density and its normalized form.
fn lattice_shape(h: f64, lambda: f64, truncation_order: usize) -> f64 {
    let s = (0.5 * lambda).sin();
    2.0 * s * s * lattice_sum(h, lambda, truncation_order)
}

/// Spectral density `f_{H,C}(lambda)` for `lambda` in `[-pi, pi] \ {0}`.
pub fn spectral_density(
    params: &LongMemoryParams,
    config: &SpectralConfig,
    lambda: f64,
) -> Result<f64> {
    config.validate()?;
    validate_lambda(lambda)?;
    Ok(kappa(params.h)
        * params.c
        * params.c
        * lattice_shape(params.h, lambda, config.truncation_order))
}

/// Log-normalizer `a_H = exp[-(1/2pi) int_{-pi}^{pi} log((1 - cos t)
/// sum_k |t + 2 pi k|^{-1-2H}) dt]`, the constant that gives the normalized
/// density a vanishing log-integral. At `H = 1/2` it equals 2 exactly.
pub fn log_normalizer(h: f64, config: &SpectralConfig) -> Result<f64> {
    validate_h(h)?;
    config.validate()?;
    Ok(log_normalizer_unchecked(h, config))
}

/// `a_H` without the domain check; spans `(0, 1)` for use at shifted orders
/// such as `(H + 1) / 2` inside the limit constants.
pub(crate) fn log_normalizer_unchecked(h: f64, config: &SpectralConfig) -> f64 {
    let integral = quad::integrate_to_origin(
        |t| lattice_shape(h, t, config.truncation_order).ln(),
        PI,
        config.quadrature_panels,
    );
    // The integrand is even, so the full-interval mean is integral / pi.
    (-integral / PI).exp()
}

/// Normalized spectral density `g_H(lambda) = a_H (1 - cos lambda)
/// sum_k |lambda + 2 pi k|^{-1-2H}`, satisfying `int log g_H = 0`.
pub fn normalized_density(h: f64, config: &SpectralConfig, lambda: f64) -> Result<f64> {
    validate_h(h)?;
    config.validate()?;
    validate_lambda(lambda)?;
    Ok(log_normalizer_unchecked(h, config) * lattice_shape(h, lambda, config.truncation_order))
}

/// Ratio `mu(H) = a_H / kappa(H)` linking the scales: `C^2 = mu(H) sigma^2`.
pub fn mu(h: f64, config: &SpectralConfig) -> Result<f64> {
    validate_h(h)?;
    config.validate()?;
    Ok(log_normalizer_unchecked(h, config) / kappa(h))
}

/// Scale `C = sqrt(mu(H) sigma^2)` recovered from the normalized-density
/// level `sigma^2`.
pub fn scale_from_sigma2(h: f64, sigma2: f64, config: &SpectralConfig) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(LongMemError::Parameter {
            name: "sigma2",
            value: sigma2,
            constraint: "sigma2 > 0 and finite",
        });
    }
    Ok((mu(h, config)? * sigma2).sqrt())
}

/// Level `sigma^2 = C^2 / mu(H)` of the normalized density under scale `C`.
pub fn sigma2_from_scale(h: f64, c: f64, config: &SpectralConfig) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(LongMemError::Parameter {
            name: "c",
            value: c,
            constraint: "c > 0 and finite",
        });
    }
    Ok(c * c / mu(h, config)?)
}

/// Normalizing constant of the Rosenblatt process,
/// `c_Z(H) = sqrt(2H(2H-1)) / B(1 - H, H/2)`, which gives the process unit
/// variance at time one.
pub fn rosenblatt_constant(h: f64) -> Result<f64> {
    validate_h(h)?;
    let beta = gamma(1.0 - h) * gamma(0.5 * h) / gamma(1.0 - 0.5 * h);
    Ok((2.0 * h * (2.0 * h - 1.0)).sqrt() / beta)
}

/// Constants appearing in the non-central limit theory of the Whittle
/// estimator. All of them are diagnostics: none enters the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConstants {
    /// Rate constant of the Hurst estimate, with the `(1 + H)^2`
    /// normalization its defining display uses.
    pub gamma: f64,
    /// Same constant under the `(1 - H)^2` normalization that the
    /// second-chaos building block carries; the two published forms differ
    /// in exactly this factor, so both are reported.
    pub gamma_variant: f64,
    /// Rate constant of the level estimate `sigma^2`.
    pub beta: f64,
    /// Scale map `mu(H) = a_H / kappa(H)`.
    pub mu: f64,
    /// Derivative of the scale map, by Richardson-extrapolated central
    /// differences.
    pub mu_prime: f64,
    /// Rate constant of the scale estimate:
    /// `rho = (mu'^2 gamma + (4/pi) beta mu^2) / (4 mu)`.
    pub rho: f64,
}

/// Computes the limit-theory constants at Hurst index `h`.
///
/// The second `H`-derivative of `1 / g_H` is formed by central differences
/// at steps `fd_step` and `fd_step / 2` with one Richardson extrapolation;
/// if the two levels disagree beyond 1e-3 relative at the integral level,
/// the computation reports a derivative-instability error instead of a
/// silently wrong constant.
pub fn limit_constants(h: f64, config: &SpectralConfig) -> Result<LimitConstants> {
    validate_h(h)?;
    config.validate()?;
    let k_ord = config.truncation_order;
    let panels = config.quadrature_panels;

    let mid_h = 0.5 * (h + 1.0);
    let kappa_mid = kappa(mid_h);
    let kappa_h = kappa(h);
    let a_h = log_normalizer_unchecked(h, config);

    // A = int_{-pi}^{pi} f_{(H+1)/2,1} / g_H, shared by gamma and beta.
    let a_integral = 2.0
        * quad::integrate_to_origin(
            |t| {
                kappa_mid * lattice_shape(mid_h, t, k_ord) / (a_h * lattice_shape(h, t, k_ord))
            },
            PI,
            panels,
        );

    // B(step) = int_{-pi}^{pi} f_{H,1} d^2/dH^2 (1/g_H) by central differences.
    let second_derivative_integral = |step: f64| -> f64 {
        let a_plus = log_normalizer_unchecked(h + step, config);
        let a_minus = log_normalizer_unchecked(h - step, config);
        2.0 * quad::integrate_to_origin(
            |t| {
                let inv_plus = 1.0 / (a_plus * lattice_shape(h + step, t, k_ord));
                let inv_mid = 1.0 / (a_h * lattice_shape(h, t, k_ord));
                let inv_minus = 1.0 / (a_minus * lattice_shape(h - step, t, k_ord));
                let d2 = (inv_plus - 2.0 * inv_mid + inv_minus) / (step * step);
                kappa_h * lattice_shape(h, t, k_ord) * d2
            },
            PI,
            panels,
        )
    };
    let b_coarse = second_derivative_integral(config.fd_step);
    let b_fine = second_derivative_integral(0.5 * config.fd_step);
    let b_integral = (4.0 * b_fine - b_coarse) / 3.0;
    let disagreement = ((b_fine - b_coarse) / b_integral).abs();
    if disagreement > 1e-3 {
        return Err(LongMemError::DerivativeInstability {
            disagreement,
            limit: 1e-3,
        });
    }

    let gamma_factor = |sign: f64| {
        16.0 * PI * (2.0 * (2.0 * h - 1.0) / (h * (1.0 + sign * h).powi(2))).sqrt()
    };
    let gamma_const = gamma_factor(1.0) * a_integral / b_integral;
    let gamma_variant = gamma_factor(-1.0) * a_integral / b_integral;
    let beta_const =
        (2.0 * (2.0 * h - 1.0) / (h * (1.0 - h).powi(2))).sqrt() * a_integral;

    let mu_h = a_h / kappa_h;
    let mu_at = |x: f64| log_normalizer_unchecked(x, config) / kappa(x);
    let mu_diff = |step: f64| (mu_at(h + step) - mu_at(h - step)) / (2.0 * step);
    let mu_prime =
        (4.0 * mu_diff(0.5 * config.fd_step) - mu_diff(config.fd_step)) / 3.0;

    let rho = (mu_prime * mu_prime * gamma_const + 4.0 / PI * beta_const * mu_h * mu_h)
        / (4.0 * mu_h);

    Ok(LimitConstants {
        gamma: gamma_const,
        gamma_variant,
        beta: beta_const,
        mu: mu_h,
        mu_prime,
        rho,
    })
}

/// Parameters, configuration, and derived constants bundled for repeated
/// density evaluation.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    params: LongMemoryParams,
    config: SpectralConfig,
    log_normalizer: f64,
    sigma2: f64,
}

impl SpectralModel {
    pub fn new(params: LongMemoryParams, config: SpectralConfig) -> Result<Self> {
        config.validate()?;
        let a_h = log_normalizer_unchecked(params.h, &config);
        let sigma2 = kappa(params.h) * params.c * params.c / a_h;
        Ok(Self {
            params,
            config,
            log_normalizer: a_h,
            sigma2,
        })
    }

    pub fn params(&self) -> &LongMemoryParams {
        &self.params
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.config
    }

    /// The constant `a_H`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Level `sigma^2` with `f = sigma^2 g_H`.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn autocovariance(&self, lag: i64) -> f64 {
        autocovariance(&self.params, lag)
    }

    pub fn spectral_density(&self, lambda: f64) -> Result<f64> {
        validate_lambda(lambda)?;
        Ok(kappa(self.params.h)
            * self.params.c
            * self.params.c
            * lattice_shape(self.params.h, lambda, self.config.truncation_order))
    }

    pub fn normalized_density(&self, lambda: f64) -> Result<f64> {
        validate_lambda(lambda)?;
        Ok(self.log_normalizer
            * lattice_shape(self.params.h, lambda, self.config.truncation_order))
    }
}

/// Precomputed alias-sum logarithms for a fixed frequency grid.
///
/// Evaluating the lattice shape at many frequencies for many `H` values is
/// the hot path of Whittle fitting; caching `ln|lambda + 2 pi k|` turns each
/// shape evaluation into a row of `exp` calls.
pub(crate) struct LatticeTable {
    truncation_order: usize,
    lambdas: Vec<f64>,
    double_sin_sq: Vec<f64>,
    /// `2K + 3` entries per frequency: `ln|lambda + 2 pi k|` for
    /// `k = -K..=K`, then the two tail bases `ln(2 pi (K+1) -+ |lambda|)`.
    logs: Vec<f64>,
}

impl LatticeTable {
    pub(crate) fn new(lambdas: &[f64], truncation_order: usize) -> Self {
        let row = 2 * truncation_order + 3;
        let mut logs = Vec::with_capacity(row * lambdas.len());
        let mut double_sin_sq = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            debug_assert!(lambda != 0.0 && lambda.abs() <= PI);
            let a = lambda.abs();
            logs.push(a.ln());
            for k in 1..=truncation_order {
                let base = 2.0 * PI * k as f64;
                logs.push((base + a).ln());
                logs.push((base - a).ln());
            }
            let m = 2.0 * PI * (truncation_order + 1) as f64;
            logs.push((m + a).ln());
            logs.push((m - a).ln());
            let s = (0.5 * lambda).sin();
            double_sin_sq.push(2.0 * s * s);
        }
        Self {
            truncation_order,
            lambdas: lambdas.to_vec(),
            double_sin_sq,
            logs,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.lambdas.len()
    }

    /// Lattice shape `(1 - cos lambda_i) sum_k |lambda_i + 2 pi k|^{-1-2H}`
    /// at grid row `i`.
    pub(crate) fn shape_at(&self, i: usize, h: f64) -> f64 {
        let row = 2 * self.truncation_order + 3;
        let logs = &self.logs[i * row..(i + 1) * row];
        let expo = -(1.0 + 2.0 * h);
        let mut sum = 0.0;
        for &l in &logs[..row - 2] {
            sum += (expo * l).exp();
        }
        for &l in &logs[row - 2..] {
            let integral = (-2.0 * h * l).exp() / (4.0 * PI * h);
            let half_term = 0.5 * (expo * l).exp();
            let derivative_term = PI * (1.0 + 2.0 * h) * ((expo - 1.0) * l).exp() / 6.0;
            sum += integral + half_term + derivative_term;
        }
        self.double_sin_sq[i] * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SpectralConfig {
        SpectralConfig::default()
    }

    /// Hurwitz zeta by Euler-Maclaurin, accurate to ~1e-14 for s in (2, 3):
    /// an independent closed-form route to the alias sum via
    /// `sum_k |lambda + 2 pi k|^{-s} = (2 pi)^{-s} (zeta(s, q) + zeta(s, 1-q))`
    /// with `q = lambda / 2 pi`.
    fn hurwitz_zeta(s: f64, q: f64) -> f64 {
        let m = 60usize;
        let mut sum = 0.0;
        for k in 0..m {
            sum += (k as f64 + q).powf(-s);
        }
        let x = m as f64 + q;
        sum + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
            + s * x.powf(-s - 1.0) / 12.0
            - s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0) / 720.0
    }

    #[test]
    fn params_and_config_reject_out_of_domain_values() {
        assert!(LongMemoryParams::new(0.5, 1.0).is_err());
        assert!(LongMemoryParams::new(1.0, 1.0).is_err());
        assert!(LongMemoryParams::new(0.75, 0.0).is_err());
        assert!(LongMemoryParams::new(0.75, f64::NAN).is_err());
        assert!(LongMemoryParams::new(0.75, 1.0).is_ok());

        let bad_k = SpectralConfig {
            truncation_order: 9,
            ..cfg()
        };
        assert!(bad_k.validate().is_err());
        let bad_q = SpectralConfig {
            quadrature_panels: 63,
            ..cfg()
        };
        assert!(bad_q.validate().is_err());
        let bad_fd = SpectralConfig {
            fd_step: 0.01,
            ..cfg()
        };
        assert!(bad_fd.validate().is_err());
    }

    #[test]
    fn autocovariance_matches_closed_forms() {
        let p = LongMemoryParams::new(0.75, 1.0).unwrap();
        assert!((autocovariance(&p, 0) - 1.0).abs() < 1e-15);
        // r(1) = (2^{2H} - 2) / 2 = 2^{0.5} - 1 at H = 0.75.
        let want = 2f64.sqrt() - 1.0;
        assert!((autocovariance(&p, 1) - want).abs() < 1e-15);
        assert_eq!(autocovariance(&p, -7), autocovariance(&p, 7));

        let scaled = LongMemoryParams::new(0.75, 3.0).unwrap();
        assert!((autocovariance(&scaled, 5) - 9.0 * autocovariance(&p, 5)).abs() < 1e-13);
    }

    #[test]
    fn autocovariance_series_branch_agrees_and_hits_the_long_lag_law() {
        let p = LongMemoryParams::new(0.8, 1.0).unwrap();
        // Direct second difference is still exact enough at moderate lags to
        // validate the series branch across its switchover.
        for lag in [17i64, 40, 100] {
            let t = lag as f64;
            let two_h = 1.6;
            let direct = 0.5
                * ((t + 1.0).powf(two_h) + (t - 1.0).powf(two_h) - 2.0 * t.powf(two_h));
            let got = autocovariance(&p, lag);
            assert!(
                ((got - direct) / direct).abs() < 1e-9,
                "lag {lag}: {got} vs {direct}"
            );
        }
        // r(k) ~ C^2 H (2H - 1) k^{2H-2}.
        let k = 10_000i64;
        let law = 0.8 * 0.6 * (k as f64).powf(-0.4);
        let ratio = autocovariance(&p, k) / law;
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn lattice_sum_matches_hurwitz_zeta_closed_form() {
        for &h in &[0.55, 0.7, 0.9] {
            let s = 1.0 + 2.0 * h;
            for &lambda in &[0.1, 0.9, 2.0, PI] {
                let q = lambda / (2.0 * PI);
                let closed =
                    (2.0 * PI).powf(-s) * (hurwitz_zeta(s, q) + hurwitz_zeta(s, 1.0 - q));
                let got = lattice_sum(h, lambda, cfg().truncation_order);
                assert!(
                    ((got - closed) / closed).abs() < 1e-10,
                    "h {h} lambda {lambda}: {got} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn half_hurst_boundary_recovers_white_noise_density() {
        // At H = 1/2 the covariance is a unit impulse, so the density must be
        // the constant 1 / 2 pi; equivalently (1 - cos) times the alias sum
        // equals 1/2 exactly.
        for &lambda in &[0.3, 1.2, PI] {
            let f = kappa(0.5) * lattice_shape(0.5, lambda, cfg().truncation_order);
            assert!(
                (f - 1.0 / (2.0 * PI)).abs() < 1e-14,
                "lambda {lambda}: {f}"
            );
        }
    }

    #[test]
    fn doubling_the_truncation_order_leaves_densities_unchanged() {
        let config = cfg();
        for &h in &[0.55, 0.75, 0.95] {
            let p = LongMemoryParams::new(h, 1.0).unwrap();
            let lambda = 0.5 * PI;
            let base = spectral_density(&p, &config, lambda).unwrap();
            let doubled = spectral_density(
                &p,
                &SpectralConfig {
                    truncation_order: 2 * config.truncation_order,
                    ..config
                },
                lambda,
            )
            .unwrap();
            assert!(
                ((base - doubled) / base).abs() < 1e-8,
                "h {h}: {base} vs {doubled}"
            );
        }
    }

    #[test]
    fn density_integrates_to_the_variance() {
        // int_{-pi}^{pi} f = r(0) = C^2 pins the prefactor kappa.
        let p = LongMemoryParams::new(0.7, 1.0).unwrap();
        let config = cfg();
        let integral = 2.0
            * quad::integrate_to_origin(
                |t| spectral_density(&p, &config, t).unwrap(),
                PI,
                config.quadrature_panels,
            );
        assert!((integral - 1.0).abs() < 1e-4, "integral {integral}");
    }

    #[test]
    fn log_normalizer_is_two_at_the_white_noise_boundary() {
        let config = cfg();
        let a = log_normalizer_unchecked(0.5, &config);
        assert!((a - 2.0).abs() < 1e-12, "a {a}");
        // And g_{1/2} is then identically one.
        for &lambda in &[0.4, 1.0, 2.5] {
            let g = a * lattice_shape(0.5, lambda, config.truncation_order);
            assert!((g - 1.0).abs() < 1e-12, "g {g}");
        }
    }

    #[test]
    fn log_normalizer_is_continuous_in_h() {
        let config = cfg();
        let a = log_normalizer(0.7, &config).unwrap();
        let b = log_normalizer(0.7 + 1e-6, &config).unwrap();
        assert!((a - b).abs() < 1e-4);
    }

    #[test]
    fn density_ratio_is_the_constant_sigma2() {
        let p = LongMemoryParams::new(0.65, 1.3).unwrap();
        let model = SpectralModel::new(p, cfg()).unwrap();
        let mut ratios = Vec::new();
        for i in 1..=50 {
            let lambda = PI * i as f64 / 50.0;
            let f = model.spectral_density(lambda).unwrap();
            let g = model.normalized_density(lambda).unwrap();
            ratios.push(f / g);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((hi - lo) / lo < 1e-8, "spread [{lo}, {hi}]");
        assert!((model.sigma2() - lo).abs() / lo < 1e-8);
    }

    #[test]
    fn scale_maps_round_trip_and_stay_positive() {
        let config = cfg();
        let sigma2 = sigma2_from_scale(0.7, 1.0, &config).unwrap();
        let c = scale_from_sigma2(0.7, sigma2, &config).unwrap();
        assert!((c - 1.0).abs() < 1e-10, "c {c}");
        let mut h = 0.51;
        while h < 0.995 {
            assert!(mu(h, &config).unwrap() > 0.0, "mu sign at {h}");
            h += 0.02;
        }
    }

    #[test]
    fn rosenblatt_constant_matches_tanh_sinh_beta_integral() {
        // B(1 - H, H/2) = int_0^1 t^{-H} (1 - t)^{H/2 - 1} dt via tanh-sinh,
        // which handles both endpoint singularities.
        let h: f64 = 0.75;
        let (alpha, beta_e) = (1.0 - h, 0.5 * h);
        let step: f64 = 5e-3;
        let mut integral = 0.0;
        let mut k = -1000i64;
        while k <= 1000 {
            let u = step * k as f64;
            let w = 0.5 * PI * u.sinh();
            // Logistic forms keep 1 - t exact near the endpoints, where a
            // tanh-based subtraction would lose the singular tail.
            let t = 1.0 / (1.0 + (-2.0 * w).exp());
            let one_minus_t = 1.0 / (1.0 + (2.0 * w).exp());
            let jac = 0.25 * PI * u.cosh() / w.cosh().powi(2);
            integral += step * jac * t.powf(alpha - 1.0) * one_minus_t.powf(beta_e - 1.0);
            k += 1;
        }
        let oracle = (2.0 * h * (2.0 * h - 1.0)).sqrt() / integral;
        let got = rosenblatt_constant(h).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-10,
            "{got} vs {oracle}"
        );
    }

    #[test]
    fn limit_constants_are_finite_and_positive_where_expected() {
        let lc = limit_constants(0.75, &cfg()).unwrap();
        for v in [lc.gamma, lc.gamma_variant, lc.beta, lc.mu, lc.rho] {
            assert!(v.is_finite() && v > 0.0, "{lc:?}");
        }
        assert!(lc.mu_prime.is_finite());
        // The two published square-root normalizations differ by the factor
        // (1 + H) / (1 - H).
        let want = (1.0 + 0.75) / (1.0 - 0.75);
        assert!((lc.gamma_variant / lc.gamma - want).abs() < 1e-12);
    }

    #[test]
    fn limit_constants_match_a_refined_configuration() {
        let lc = limit_constants(0.75, &cfg()).unwrap();
        let refined = limit_constants(
            0.75,
            &SpectralConfig {
                truncation_order: 400,
                quadrature_panels: 96,
                fd_step: 2.5e-4,
            },
        )
        .unwrap();
        for (a, b) in [
            (lc.gamma, refined.gamma),
            (lc.beta, refined.beta),
            (lc.mu, refined.mu),
            (lc.mu_prime, refined.mu_prime),
            (lc.rho, refined.rho),
        ] {
            assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn lattice_table_matches_scalar_shapes() {
        let lambdas: Vec<f64> = (1..=40).map(|k| PI * k as f64 / 40.0).collect();
        let table = LatticeTable::new(&lambdas, 200);
        for (i, &lambda) in lambdas.iter().enumerate() {
            for &h in &[0.55, 0.75, 0.95] {
                let fast = table.shape_at(i, h);
                let slow = lattice_shape(h, lambda, 200);
                assert!(
                    ((fast - slow) / slow).abs() < 1e-13,
                    "h {h} lambda {lambda}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn frequency_domain_is_enforced() {
        let p = LongMemoryParams::new(0.7, 1.0).unwrap();
        let config = cfg();
        assert!(matches!(
            spectral_density(&p, &config, 0.0),
            Err(LongMemError::ZeroFrequency)
        ));
        assert!(spectral_density(&p, &config, 3.2).is_err());
        assert!(spectral_density(&p, &config, -PI).is_ok());
    }
}
