//! Whittle and local Whittle estimation of the memory parameters.
//!
//! The Whittle estimate minimizes the discretized contrast
//!
//! ```text
//! J(h) = (2 pi / N) sum_{k=1}^{N} I(pi k / N) / g_h(pi k / N)
//! ```
//!
//! over `h`, where `I` is the mean-corrected periodogram and `g_h` the
//! normalized spectral density; the minimizing `h` and level `sigma^2 =
//! J(h*) / 2 pi` then yield the scale through `C = sqrt(mu(h) sigma^2)`.
//! The search runs a coarse grid pass followed by golden-section
//! refinement, which handles the flat, occasionally multi-welled profiles
//! near the domain edges better than derivative methods.
//!
//! The local Whittle estimate is the standard semiparametric contrast over
//! the lowest `m` Fourier frequencies, included as the comparison baseline.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::LongMemError;
use crate::periodogram::{periodogram_grid, PeriodogramGrid};
use crate::quad;
use crate::simulate::TimeSeries;
use crate::spectral::{kappa, LatticeTable, SpectralConfig};
use crate::Result;

use std::f64::consts::PI;

/// Reciprocal golden ratio, the interval contraction factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum series length for the parametric fit.
const MIN_WHITTLE_LEN: usize = 32;

/// Minimum series length for the local Whittle fit.
const MIN_LOCAL_WHITTLE_LEN: usize = 64;

/// Search controls for [`estimate_whittle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittleOptions {
    /// Distance kept from the open endpoints 1/2 and 1.
    pub boundary_margin: f64,
    /// Step of the coarse grid pass.
    pub grid_step: f64,
    /// Final bracket width of the golden-section refinement.
    pub refine_width: f64,
    /// Record the coarse-grid objective profile in the fit.
    pub keep_profile: bool,
    pub spectral: SpectralConfig,
}

impl Default for WhittleOptions {
    fn default() -> Self {
        Self {
            boundary_margin: 1e-3,
            grid_step: 0.01,
            refine_width: 1e-5,
            keep_profile: false,
            spectral: SpectralConfig::default(),
        }
    }
}

impl WhittleOptions {
    fn validate(&self) -> Result<()> {
        self.spectral.validate()?;
        if !(self.boundary_margin > 0.0 && self.boundary_margin < 0.1) {
            return Err(LongMemError::Parameter {
                name: "boundary_margin",
                value: self.boundary_margin,
                constraint: "0 < boundary_margin < 0.1",
            });
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.1) {
            return Err(LongMemError::Parameter {
                name: "grid_step",
                value: self.grid_step,
                constraint: "0 < grid_step <= 0.1",
            });
        }
        if !(self.refine_width > 0.0 && self.refine_width <= self.grid_step) {
            return Err(LongMemError::Parameter {
                name: "refine_width",
                value: self.refine_width,
                constraint: "0 < refine_width <= grid_step",
            });
        }
        Ok(())
    }
}

/// Result of a parametric Whittle fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittleFit {
    /// Estimated Hurst index.
    pub h_hat: f64,
    /// Level of the normalized density, `J(h_hat) / 2 pi`.
    pub sigma2_hat: f64,
    /// Estimated scale, `sqrt(mu(h_hat) sigma2_hat)`.
    pub c_hat: f64,
    /// Contrast value at the minimizer.
    pub objective: f64,
    /// Objective evaluations spent in the search.
    pub n_evaluations: usize,
    /// Final refinement bracket around `h_hat`.
    pub bracket: (f64, f64),
    /// `h_hat` landed within twice the boundary margin of an endpoint,
    /// where the parametric model loses identifiability.
    pub near_boundary: bool,
    /// Coarse-grid `(h, objective)` profile when requested.
    pub profile: Option<Vec<(f64, f64)>>,
}

/// Precomputed frequency tables for Whittle objectives at one series
/// length.
///
/// Building one evaluator per length and fitting many series against it
/// amortizes the `ln|lambda + 2 pi k|` tables; the per-`h` normalized
/// density over the coarse search grid is additionally cached, keyed by
/// the exact bits of `h`, since every fit visits the same grid points.
pub struct WhittleEvaluator {
    n: usize,
    config: SpectralConfig,
    grid_table: LatticeTable,
    quad_table: LatticeTable,
    quad_weights: Vec<f64>,
    cache: RwLock<HashMap<u64, Arc<Vec<f64>>>>,
}

impl WhittleEvaluator {
    pub fn new(n: usize, config: SpectralConfig) -> Result<Self> {
        config.validate()?;
        if n < MIN_WHITTLE_LEN {
            return Err(LongMemError::SeriesTooShort {
                len: n,
                min: MIN_WHITTLE_LEN,
            });
        }
        let lambdas: Vec<f64> = (1..=n).map(|k| PI * k as f64 / n as f64).collect();
        let grid_table = LatticeTable::new(&lambdas, config.truncation_order);
        let (nodes, quad_weights) = quad::nodes_to_origin(PI, config.quadrature_panels);
        let quad_table = LatticeTable::new(&nodes, config.truncation_order);
        Ok(Self {
            n,
            config,
            grid_table,
            quad_table,
            quad_weights,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.config
    }

    /// Log-normalizer `a_h` from the tabulated quadrature nodes.
    fn normalizer(&self, h: f64) -> f64 {
        let mut integral = 0.0;
        for (i, &w) in self.quad_weights.iter().enumerate() {
            integral += w * self.quad_table.shape_at(i, h).ln();
        }
        (-integral / PI).exp()
    }

    fn inverse_density_grid(&self, h: f64) -> Vec<f64> {
        let a = self.normalizer(h);
        (0..self.grid_table.len())
            .map(|i| 1.0 / (a * self.grid_table.shape_at(i, h)))
            .collect()
    }

    fn cached_inverse_density(&self, h: f64) -> Arc<Vec<f64>> {
        let key = h.to_bits();
        if let Some(hit) = self.cache.read().unwrap().get(&key) {
            return Arc::clone(hit);
        }
        // Racing threads may compute the same grid; the value depends only
        // on the key, so whichever insert wins is identical.
        let fresh = Arc::new(self.inverse_density_grid(h));
        let mut guard = self.cache.write().unwrap();
        Arc::clone(guard.entry(key).or_insert(fresh))
    }

    fn contract(&self, ordinates: &[f64], inverse_density: &[f64]) -> f64 {
        let dot: f64 = ordinates
            .iter()
            .zip(inverse_density)
            .map(|(i, g)| i * g)
            .sum();
        dot * 2.0 * PI / self.n as f64
    }

    /// Whittle contrast `J(h)` for periodogram `ordinates` on this
    /// evaluator's grid.
    pub fn objective(&self, ordinates: &[f64], h: f64) -> f64 {
        self.contract(ordinates, &self.inverse_density_grid(h))
    }

    /// Same contrast, memoizing the per-`h` density grid; meant for the
    /// coarse-grid pass whose `h` values repeat across fits.
    pub fn objective_cached(&self, ordinates: &[f64], h: f64) -> f64 {
        self.contract(ordinates, &self.cached_inverse_density(h))
    }
}

/// Whittle contrast for one `(grid, h)` pair through a throwaway
/// evaluator; repeated evaluations on equal-length series should build a
/// [`WhittleEvaluator`] once instead.
pub fn whittle_objective(grid: &PeriodogramGrid, h: f64, config: &SpectralConfig) -> Result<f64> {
    crate::spectral::LongMemoryParams::new(h, 1.0)?;
    if !grid.mean_corrected() {
        return Err(LongMemError::Parameter {
            name: "grid",
            value: 0.0,
            constraint: "the contrast is defined on the mean-corrected periodogram",
        });
    }
    let evaluator = WhittleEvaluator::new(grid.n(), *config)?;
    Ok(evaluator.objective(grid.ordinates(), h))
}

fn golden_section_min(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    width: f64,
) -> (f64, f64, usize) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while b - a > width {
        if f1 <= f2 {
            // Ties contract toward the lower end, matching the grid pass.
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 <= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}

/// Degeneracy guard: a series whose centered energy sits at rounding level
/// has no spectral information to fit.
fn check_not_degenerate(grid: &PeriodogramGrid, values: &[f64]) -> Result<()> {
    let peak = grid.ordinates().iter().cloned().fold(0.0f64, f64::max);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (f64::EPSILON * (1.0 + scale)).powi(2);
    if peak <= floor {
        return Err(LongMemError::DegenerateSeries);
    }
    Ok(())
}

/// Whittle fit of `(H, C)` against a fresh evaluator for this series
/// length. Fitting many equal-length series is cheaper through
/// [`estimate_whittle_with`].
pub fn estimate_whittle(series: &TimeSeries, options: &WhittleOptions) -> Result<WhittleFit> {
    let evaluator = WhittleEvaluator::new(series.len(), options.spectral)?;
    estimate_whittle_with(&evaluator, series, options)
}

/// Whittle fit reusing a prebuilt evaluator (same series length).
pub fn estimate_whittle_with(
    evaluator: &WhittleEvaluator,
    series: &TimeSeries,
    options: &WhittleOptions,
) -> Result<WhittleFit> {
    options.validate()?;
    if series.len() != evaluator.n() {
        return Err(LongMemError::Parameter {
            name: "series length",
            value: series.len() as f64,
            constraint: "series length must match the evaluator grid",
        });
    }
    let grid = periodogram_grid(series.values(), true)?;
    check_not_degenerate(&grid, series.values())?;
    let ordinates = grid.ordinates();

    let lo = 0.5 + options.boundary_margin;
    let hi = 1.0 - options.boundary_margin;

    // Coarse pass: step-sized walk from lo, with hi appended so the upper
    // boundary region is always probed.
    let mut grid_points = Vec::new();
    let mut h = lo;
    while h < hi {
        grid_points.push(h);
        h += options.grid_step;
    }
    grid_points.push(hi);

    let mut profile = Vec::with_capacity(grid_points.len());
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for (i, &h) in grid_points.iter().enumerate() {
        let val = evaluator.objective_cached(ordinates, h);
        if val < best_val {
            best_val = val;
            best_idx = i;
        }
        profile.push((h, val));
    }
    let mut evals = grid_points.len();

    let bracket_lo = if best_idx == 0 { lo } else { grid_points[best_idx - 1] };
    let bracket_hi = if best_idx + 1 == grid_points.len() {
        hi
    } else {
        grid_points[best_idx + 1]
    };

    let (mut h_hat, mut objective, golden_evals) = golden_section_min(
        |h| evaluator.objective(ordinates, h),
        bracket_lo,
        bracket_hi,
        options.refine_width,
    );
    evals += golden_evals;
    // The refinement never revisits the grid nodes; keep whichever is lower.
    if best_val < objective {
        h_hat = grid_points[best_idx];
        objective = best_val;
    }

    let sigma2_hat = objective / (2.0 * PI);
    let mu = evaluator.normalizer(h_hat) / kappa(h_hat);
    let c_hat = (mu * sigma2_hat).sqrt();
    let near_boundary =
        h_hat <= lo + 2.0 * options.boundary_margin || h_hat >= hi - 2.0 * options.boundary_margin;

    Ok(WhittleFit {
        h_hat,
        sigma2_hat,
        c_hat,
        objective,
        n_evaluations: evals,
        bracket: (bracket_lo, bracket_hi),
        near_boundary,
        profile: options.keep_profile.then_some(profile),
    })
}

/// Result of a local Whittle fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalWhittleFit {
    /// Estimated Hurst index, `d_hat + 1/2`.
    pub h_hat: f64,
    /// Estimated memory parameter of the increments.
    pub d_hat: f64,
    /// Number of Fourier frequencies used.
    pub bandwidth: usize,
    /// Contrast value at the minimizer.
    pub objective: f64,
    /// Objective evaluations spent in the search.
    pub n_evaluations: usize,
    /// `d_hat` landed within twice the margin of the search endpoints.
    pub near_boundary: bool,
}

/// Local Whittle fit over the lowest `m` Fourier frequencies;
/// `bandwidth = None` selects `m = floor(N^{0.65})`.
///
/// Minimizes `R(d) = log((1/m) sum_j lambda_j^{2d} I(lambda_j)) -
/// (2d/m) sum_j log lambda_j` for `d` in `(0, 1/2)`, and reports
/// `H = d + 1/2`.
pub fn estimate_local_whittle(
    series: &TimeSeries,
    bandwidth: Option<usize>,
) -> Result<LocalWhittleFit> {
    let n = series.len();
    if n < MIN_LOCAL_WHITTLE_LEN {
        return Err(LongMemError::SeriesTooShort {
            len: n,
            min: MIN_LOCAL_WHITTLE_LEN,
        });
    }
    let m = bandwidth.unwrap_or_else(|| (n as f64).powf(0.65).floor() as usize);
    if m < 4 {
        return Err(LongMemError::Bandwidth {
            m,
            n,
            reason: "needs at least 4 frequencies",
        });
    }
    if 2 * m >= n {
        return Err(LongMemError::Bandwidth {
            m,
            n,
            reason: "bandwidth must stay below N/2",
        });
    }

    let grid = periodogram_grid(series.values(), true)?;
    check_not_degenerate(&grid, series.values())?;
    let ordinates: Vec<f64> = (1..=m)
        .map(|j| grid.fourier_ordinate(j).expect("m < N/2"))
        .collect();
    let log_lambdas: Vec<f64> = (1..=m)
        .map(|j| (2.0 * PI * j as f64 / n as f64).ln())
        .collect();
    let mean_log_lambda = log_lambdas.iter().sum::<f64>() / m as f64;

    let contrast = |d: f64| {
        let mut acc = 0.0;
        for (i, &log_l) in log_lambdas.iter().enumerate() {
            acc += (2.0 * d * log_l).exp() * ordinates[i];
        }
        (acc / m as f64).ln() - 2.0 * d * mean_log_lambda
    };

    let margin = 1e-3;
    let (d_lo, d_hi) = (margin, 0.5 - margin);
    let step = 0.01;
    let mut grid_points = Vec::new();
    let mut d = d_lo;
    while d < d_hi {
        grid_points.push(d);
        d += step;
    }
    grid_points.push(d_hi);

    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for (i, &d) in grid_points.iter().enumerate() {
        let val = contrast(d);
        if val < best_val {
            best_val = val;
            best_idx = i;
        }
    }
    let mut evals = grid_points.len();

    let bracket_lo = if best_idx == 0 {
        d_lo
    } else {
        grid_points[best_idx - 1]
    };
    let bracket_hi = if best_idx + 1 == grid_points.len() {
        d_hi
    } else {
        grid_points[best_idx + 1]
    };
    let (mut d_hat, mut objective, golden_evals) =
        golden_section_min(contrast, bracket_lo, bracket_hi, 1e-5);
    evals += golden_evals;
    if best_val < objective {
        d_hat = grid_points[best_idx];
        objective = best_val;
    }

    Ok(LocalWhittleFit {
        h_hat: 0.5 + d_hat,
        d_hat,
        bandwidth: m,
        objective,
        n_evaluations: evals,
        near_boundary: d_hat <= d_lo + 2.0 * margin || d_hat >= d_hi - 2.0 * margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodogram::integrated_periodogram;
    use crate::simulate::{simulate_fgn, SeedSpec, TimeSeries};
    use crate::spectral::normalized_density;

    fn fgn(h: f64, n: usize, stream: u64) -> TimeSeries {
        simulate_fgn(h, n, &SeedSpec::new(99, stream)).unwrap()
    }

    #[test]
    fn objective_agrees_with_the_weighted_periodogram_integral() {
        let ts = fgn(0.7, 128, 0);
        let options = WhittleOptions::default();
        let evaluator = WhittleEvaluator::new(128, options.spectral).unwrap();
        let grid = periodogram_grid(ts.values(), true).unwrap();
        for &h in &[0.55, 0.7, 0.9] {
            let fast = evaluator.objective(grid.ordinates(), h);
            let slow = integrated_periodogram(&grid, |lambda| {
                1.0 / normalized_density(h, &options.spectral, lambda).unwrap()
            })
            .unwrap();
            assert!(
                ((fast - slow) / slow).abs() < 1e-10,
                "h {h}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn population_contrast_is_minimized_at_the_true_parameter() {
        // The continuum contrast h -> int g_{0.7}/g_h must bottom out at
        // the true parameter; this pins the log-normalizer end to end,
        // since a wrong normalizer shifts the argmin.
        let h_true = 0.7;
        let config = SpectralConfig::default();
        let reference = crate::spectral::SpectralModel::new(
            crate::spectral::LongMemoryParams::new(h_true, 1.0).unwrap(),
            config,
        )
        .unwrap();
        let contrast = |h: f64| {
            let model = crate::spectral::SpectralModel::new(
                crate::spectral::LongMemoryParams::new(h, 1.0).unwrap(),
                config,
            )
            .unwrap();
            crate::quad::integrate_to_origin(
                |lambda| {
                    reference.normalized_density(lambda).unwrap()
                        / model.normalized_density(lambda).unwrap()
                },
                PI,
                48,
            )
        };
        let (h_star, _, _) = golden_section_min(contrast, 0.65, 0.75, 1e-5);
        assert!(
            (h_star - h_true).abs() < 1e-3,
            "population argmin {h_star}"
        );
    }

    #[test]
    fn grid_argmin_concentrates_near_the_truth_across_replications() {
        let n = 4096;
        let h_true = 0.7;
        let candidates: Vec<f64> = (0..9).map(|i| 0.55 + 0.05 * i as f64).collect();
        let options = WhittleOptions::default();
        let evaluator = WhittleEvaluator::new(n, options.spectral).unwrap();
        let reps = 200;
        let mut hits = 0;
        for rep in 0..reps {
            let ts = simulate_fgn(h_true, n, &SeedSpec::new(7, rep)).unwrap();
            let grid = periodogram_grid(ts.values(), true).unwrap();
            let best = candidates
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    evaluator
                        .objective_cached(grid.ordinates(), a)
                        .partial_cmp(&evaluator.objective_cached(grid.ordinates(), b))
                        .unwrap()
                })
                .unwrap();
            if (best - h_true).abs() < 0.026 {
                hits += 1;
            }
        }
        assert!(hits >= reps * 9 / 10, "only {hits}/{reps} on target");
    }

    #[test]
    fn full_fit_recovers_simulated_parameters_roughly() {
        let ts = fgn(0.7, 4096, 3);
        let fit = estimate_whittle(&ts, &WhittleOptions::default()).unwrap();
        assert!((fit.h_hat - 0.7).abs() < 0.1, "h_hat {}", fit.h_hat);
        assert!((fit.c_hat - 1.0).abs() < 0.3, "c_hat {}", fit.c_hat);
        assert!(!fit.near_boundary);
        assert!(fit.bracket.1 - fit.bracket.0 <= 0.02 + 1e-12);
    }

    #[test]
    fn fits_are_deterministic_and_scale_equivariant() {
        let ts = fgn(0.65, 512, 4);
        let options = WhittleOptions::default();
        let a = estimate_whittle(&ts, &options).unwrap();
        let b = estimate_whittle(&ts, &options).unwrap();
        assert_eq!(a, b);

        let scaled =
            TimeSeries::from_values(ts.values().iter().map(|v| 3.0 * v).collect()).unwrap();
        let c = estimate_whittle(&scaled, &options).unwrap();
        assert!((c.h_hat - a.h_hat).abs() < 2.0 * options.refine_width);
        assert!((c.sigma2_hat / a.sigma2_hat - 9.0).abs() < 1e-4);
        assert!((c.c_hat / a.c_hat - 3.0).abs() < 1e-3);
    }

    #[test]
    fn degenerate_and_boundary_paths_are_reported() {
        let constant = TimeSeries::from_values(vec![0.1; 64]).unwrap();
        assert!(matches!(
            estimate_whittle(&constant, &WhittleOptions::default()),
            Err(LongMemError::DegenerateSeries)
        ));

        // White noise sits at the lower edge of the parametric domain, so
        // the fit should park near the boundary and flag it.
        let ts = fgn(0.5, 1024, 5);
        let fit = estimate_whittle(&ts, &WhittleOptions::default()).unwrap();
        assert!(fit.near_boundary, "h_hat {}", fit.h_hat);
    }

    #[test]
    fn coarse_profile_is_recorded_on_request() {
        let ts = fgn(0.7, 256, 6);
        let options = WhittleOptions {
            keep_profile: true,
            ..Default::default()
        };
        let fit = estimate_whittle(&ts, &options).unwrap();
        let profile = fit.profile.unwrap();
        assert_eq!(profile.first().unwrap().0, 0.501);
        assert_eq!(profile.last().unwrap().0, 0.999);
        assert!(profile.len() > 45);
    }

    #[test]
    fn local_whittle_bandwidth_rules() {
        let ts = fgn(0.7, 1000, 8);
        let fit = estimate_local_whittle(&ts, None).unwrap();
        // floor(1000^0.65) = 89.
        assert_eq!(fit.bandwidth, 89);

        assert!(matches!(
            estimate_local_whittle(&ts, Some(3)),
            Err(LongMemError::Bandwidth { .. })
        ));
        assert!(matches!(
            estimate_local_whittle(&ts, Some(500)),
            Err(LongMemError::Bandwidth { .. })
        ));
    }

    #[test]
    fn local_whittle_tracks_the_truth_and_ignores_scale() {
        let ts = fgn(0.7, 4096, 9);
        let fit = estimate_local_whittle(&ts, None).unwrap();
        assert!((fit.h_hat - 0.7).abs() < 0.15, "h_hat {}", fit.h_hat);

        let scaled =
            TimeSeries::from_values(ts.values().iter().map(|v| 7.0 * v).collect()).unwrap();
        let fit_scaled = estimate_local_whittle(&scaled, None).unwrap();
        assert!((fit.h_hat - fit_scaled.h_hat).abs() < 1e-5);
    }

    #[test]
    fn objective_is_continuous_and_quadratically_scale_equivariant() {
        let ts = fgn(0.8, 256, 10);
        let config = SpectralConfig::default();
        let grid = periodogram_grid(ts.values(), true).unwrap();
        for &h in &[0.55, 0.72, 0.95] {
            let base = whittle_objective(&grid, h, &config).unwrap();
            let nudged = whittle_objective(&grid, h + 1e-6, &config).unwrap();
            assert!((nudged - base).abs() < 1e-3 * base.abs());
        }

        let scaled =
            TimeSeries::from_values(ts.values().iter().map(|v| 3.0 * v).collect()).unwrap();
        let grid_scaled = periodogram_grid(scaled.values(), true).unwrap();
        let a = whittle_objective(&grid, 0.7, &config).unwrap();
        let b = whittle_objective(&grid_scaled, 0.7, &config).unwrap();
        assert!((b / a - 9.0).abs() < 1e-10, "ratio {}", b / a);

        let raw = periodogram_grid(ts.values(), false).unwrap();
        assert!(whittle_objective(&raw, 0.7, &config).is_err());
    }

    #[test]
    fn refinement_is_insensitive_to_the_coarse_grid_step() {
        let ts = fgn(0.75, 1024, 11);
        let coarse = estimate_whittle(&ts, &WhittleOptions::default()).unwrap();
        let finer = estimate_whittle(
            &ts,
            &WhittleOptions {
                grid_step: 0.005,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (coarse.h_hat - finer.h_hat).abs() < 1e-3,
            "{} vs {}",
            coarse.h_hat,
            finer.h_hat
        );
        // Optimizer soundness: the refined value never sits above the grid.
        let profile_fit = estimate_whittle(
            &ts,
            &WhittleOptions {
                keep_profile: true,
                ..Default::default()
            },
        )
        .unwrap();
        for &(_, val) in profile_fit.profile.as_ref().unwrap() {
            assert!(profile_fit.objective <= val + 1e-15);
        }
    }

    #[test]
    fn both_estimators_ignore_additive_constants() {
        let ts = fgn(0.7, 512, 12);
        let shifted =
            TimeSeries::from_values(ts.values().iter().map(|v| v + 5.0).collect()).unwrap();
        let options = WhittleOptions::default();
        let a = estimate_whittle(&ts, &options).unwrap();
        let b = estimate_whittle(&shifted, &options).unwrap();
        assert!((a.h_hat - b.h_hat).abs() < 1e-6);
        assert!((a.sigma2_hat / b.sigma2_hat - 1.0).abs() < 1e-6);

        let lw_a = estimate_local_whittle(&ts, None).unwrap();
        let lw_b = estimate_local_whittle(&shifted, None).unwrap();
        assert!((lw_a.h_hat - lw_b.h_hat).abs() < 1e-6);
    }

    #[test]
    fn golden_section_finds_smooth_minima() {
        let (x, fx, evals) = golden_section_min(|x| (x - 1.3).powi(2) + 2.0, 0.0, 3.0, 1e-7);
        assert!((x - 1.3).abs() < 1e-6, "x {x}");
        assert!((fx - 2.0).abs() < 1e-12);
        assert!(evals > 10 && evals < 60);
    }
}
