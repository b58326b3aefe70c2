//! Monte Carlo harness: replication studies over (process, H, N) cells,
//! summary tables, kernel density estimates of the sampling distribution,
//! and convergence-rate diagnostics.
//!
//! Replications are keyed by stream index, so a report is a pure function
//! of its configuration: the same config produces the same report whether
//! replications run serially or across threads, and a given replication
//! index sees the same random numbers in every cell (common random
//! numbers across the design grid).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::LongMemError;
use crate::estimators::{
    estimate_local_whittle, estimate_whittle_with, WhittleEvaluator, WhittleOptions,
};
use crate::fft;
use crate::simulate::{simulate_fgn, simulate_rosenblatt_increments, SeedSpec};
use crate::stats;
use crate::Result;

/// Simulated process family for a replication study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessFamily {
    /// Rosenblatt-process increments.
    Rosenblatt,
    /// Fractional Gaussian noise.
    Fgn,
}

impl fmt::Display for ProcessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessFamily::Rosenblatt => "rosenblatt",
            ProcessFamily::Fgn => "fgn",
        })
    }
}

impl FromStr for ProcessFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rosenblatt" => Ok(ProcessFamily::Rosenblatt),
            "fgn" => Ok(ProcessFamily::Fgn),
            other => Err(format!(
                "unknown process '{other}' (expected rosenblatt or fgn)"
            )),
        }
    }
}

/// Estimator selection for a replication study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// Parametric Whittle fit of (H, C).
    Whittle,
    /// Semiparametric local Whittle fit of H.
    Lw,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Whittle => "whittle",
            EstimatorKind::Lw => "lw",
        })
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "whittle" => Ok(EstimatorKind::Whittle),
            "lw" => Ok(EstimatorKind::Lw),
            other => Err(format!("unknown estimator '{other}' (expected whittle or lw)")),
        }
    }
}

/// Minimum cell series length; keeps every estimator's preconditions met.
const MIN_CELL_LEN: usize = 64;

/// Replication-study configuration.
///
/// The file format is flat `key = value` text with `#` comments. Keys:
/// `process` (rosenblatt | fgn), `h_list` (comma-separated), `n_list`
/// (comma-separated), `reps`, `n_inner` (Rosenblatt block length, default
/// 256), `c` (scale, default 1.0), `estimators` (comma-separated subset of
/// whittle,lw; default whittle), `seed` (default 42).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub process: ProcessFamily,
    pub h_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub n_inner: usize,
    pub c: f64,
    pub estimators: Vec<EstimatorKind>,
    pub seed: u64,
}

impl McConfig {
    /// Parses the flat key-value format; unknown, duplicate, or malformed
    /// entries report their line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut process = None;
        let mut h_list = None;
        let mut n_list = None;
        let mut reps = None;
        let mut n_inner = None;
        let mut c = None;
        let mut estimators = None;
        let mut seed = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(LongMemError::Config {
                line,
                message: "expected 'key = value'".to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let dup = |name: &str| LongMemError::Config {
                line,
                message: format!("duplicate key '{name}'"),
            };
            match key {
                "process" => {
                    if process.is_some() {
                        return Err(dup(key));
                    }
                    process = Some(
                        value
                            .parse::<ProcessFamily>()
                            .map_err(|message| LongMemError::Config { line, message })?,
                    );
                }
                "h_list" => {
                    if h_list.is_some() {
                        return Err(dup(key));
                    }
                    h_list = Some(parse_list::<f64>(value, line)?);
                }
                "n_list" => {
                    if n_list.is_some() {
                        return Err(dup(key));
                    }
                    n_list = Some(parse_list::<usize>(value, line)?);
                }
                "reps" => {
                    if reps.is_some() {
                        return Err(dup(key));
                    }
                    reps = Some(parse_scalar::<usize>(value, line)?);
                }
                "n_inner" => {
                    if n_inner.is_some() {
                        return Err(dup(key));
                    }
                    n_inner = Some(parse_scalar::<usize>(value, line)?);
                }
                "c" => {
                    if c.is_some() {
                        return Err(dup(key));
                    }
                    c = Some(parse_scalar::<f64>(value, line)?);
                }
                "estimators" => {
                    if estimators.is_some() {
                        return Err(dup(key));
                    }
                    estimators = Some(parse_list::<EstimatorKind>(value, line).map_err(|e| {
                        match e {
                            LongMemError::Config { line, .. } => LongMemError::Config {
                                line,
                                message: "estimators must be a comma-separated subset of whittle,lw"
                                    .to_string(),
                            },
                            other => other,
                        }
                    })?);
                }
                "seed" => {
                    if seed.is_some() {
                        return Err(dup(key));
                    }
                    seed = Some(parse_scalar::<u64>(value, line)?);
                }
                other => {
                    return Err(LongMemError::Config {
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }

        let missing = |name: &str| LongMemError::Config {
            line: 0,
            message: format!("missing required key '{name}'"),
        };
        let config = McConfig {
            process: process.ok_or_else(|| missing("process"))?,
            h_list: h_list.ok_or_else(|| missing("h_list"))?,
            n_list: n_list.ok_or_else(|| missing("n_list"))?,
            reps: reps.ok_or_else(|| missing("reps"))?,
            n_inner: n_inner.unwrap_or(256),
            c: c.unwrap_or(1.0),
            estimators: estimators.unwrap_or_else(|| vec![EstimatorKind::Whittle]),
            seed: seed.unwrap_or(42),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| LongMemError::Config { line: 0, message };
        if self.h_list.is_empty() {
            return Err(bad("h_list must not be empty".to_string()));
        }
        for &h in &self.h_list {
            if !(h > 0.5 && h < 1.0) {
                return Err(bad(format!("h = {h} outside (1/2, 1)")));
            }
        }
        if self.n_list.is_empty() {
            return Err(bad("n_list must not be empty".to_string()));
        }
        for &n in &self.n_list {
            if n < MIN_CELL_LEN {
                return Err(bad(format!("n = {n} below the minimum {MIN_CELL_LEN}")));
            }
        }
        if self.reps < 2 {
            return Err(bad(format!("reps = {} (need at least 2)", self.reps)));
        }
        if self.n_inner < 2 {
            return Err(bad(format!("n_inner = {} (need at least 2)", self.n_inner)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(bad(format!("c = {} must be positive and finite", self.c)));
        }
        if self.estimators.is_empty() {
            return Err(bad("estimators must not be empty".to_string()));
        }
        let mut seen = Vec::new();
        for est in &self.estimators {
            if seen.contains(est) {
                return Err(bad(format!("estimator '{est}' listed twice")));
            }
            seen.push(*est);
        }
        Ok(())
    }

    /// `# key = value` comment block echoed into every output artifact;
    /// stripping the `#` prefixes yields a parseable config again.
    pub fn echo_comments(&self) -> String {
        let h_list = self
            .h_list
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let n_list = self
            .n_list
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let estimators = self
            .estimators
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "# process = {}\n# h_list = {}\n# n_list = {}\n# reps = {}\n# n_inner = {}\n# c = {}\n# estimators = {}\n# seed = {}\n",
            self.process, h_list, n_list, self.reps, self.n_inner, self.c, estimators, self.seed
        )
    }
}

fn parse_scalar<T: FromStr>(value: &str, line: usize) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| LongMemError::Config {
        line,
        message: format!("cannot parse '{}'", value.trim()),
    })
}

fn parse_list<T: FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(LongMemError::Config {
            line,
            message: "empty list".to_string(),
        });
    }
    items
        .into_iter()
        .map(|item| parse_scalar::<T>(item, line))
        .collect()
}

/// Per-cell replication summary.
///
/// `estimates` holds the successful fits in replication order; a cell with
/// failed replications is marked `partial` and its statistics cover the
/// successes only (NaN when fewer than two survive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub process: ProcessFamily,
    pub estimator: EstimatorKind,
    pub h_true: f64,
    pub n: usize,
    pub reps: usize,
    pub mean: f64,
    /// Sample standard deviation, divisor n - 1.
    pub std: f64,
    pub bias: f64,
    pub rmse: f64,
    pub skewness: f64,
    /// Fits that landed near the search boundary.
    pub boundary_warnings: usize,
    pub failures: usize,
    pub partial: bool,
    pub estimates: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale_estimates: Option<Vec<f64>>,
}

/// Full replication-study output: config echo, version stamp, wall time,
/// and one [`McCell`] per (N, H, estimator) in configuration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub version: String,
    pub config: McConfig,
    pub wall_seconds: f64,
    pub cells: Vec<McCell>,
}

impl McReport {
    /// Equality of everything except the wall-time stamp.
    pub fn same_results(&self, other: &McReport) -> bool {
        self.version == other.version && self.config == other.config && self.cells == other.cells
    }
}

/// One replication's fits; `None` means the estimator was not requested,
/// `Err` carries the failure message for the report.
#[derive(Default, Clone)]
struct RepOutcome {
    whittle: Option<std::result::Result<(f64, f64, bool), String>>,
    lw: Option<std::result::Result<(f64, bool), String>>,
}

/// Runs the replication study described by `config`.
///
/// `workers` pins the thread count (1 forces serial execution); `None`
/// uses the process-wide default pool. Results are identical either way.
pub fn run_monte_carlo(config: &McConfig, workers: Option<usize>) -> Result<McReport> {
    config.validate()?;
    let started = Instant::now();
    let cells = match workers {
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count.max(1))
                .build()
                .map_err(|e| LongMemError::Config {
                    line: 0,
                    message: format!("worker pool: {e}"),
                })?;
            pool.install(|| run_cells(config))?
        }
        None => run_cells(config)?,
    };
    Ok(McReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        wall_seconds: started.elapsed().as_secs_f64(),
        cells,
    })
}

fn run_cells(config: &McConfig) -> Result<Vec<McCell>> {
    let options = WhittleOptions::default();
    let wants_whittle = config.estimators.contains(&EstimatorKind::Whittle);
    let mut cells = Vec::new();
    for &n in &config.n_list {
        // One frequency table per length, shared by every cell and thread.
        let evaluator = if wants_whittle {
            Some(WhittleEvaluator::new(n, options.spectral)?)
        } else {
            None
        };
        for &h in &config.h_list {
            let outcomes: Vec<RepOutcome> = (0..config.reps as u64)
                .into_par_iter()
                .map(|rep| run_replication(config, &options, evaluator.as_ref(), h, n, rep))
                .collect();
            for est in &config.estimators {
                cells.push(build_cell(config, *est, h, n, &outcomes));
            }
        }
    }
    Ok(cells)
}

fn run_replication(
    config: &McConfig,
    options: &WhittleOptions,
    evaluator: Option<&WhittleEvaluator>,
    h: f64,
    n: usize,
    rep: u64,
) -> RepOutcome {
    let seed = SeedSpec::new(config.seed, rep);
    let series = match config.process {
        ProcessFamily::Rosenblatt => {
            simulate_rosenblatt_increments(h, n, config.n_inner, config.c, &seed)
        }
        ProcessFamily::Fgn => simulate_fgn(h, n, &seed),
    };
    let series = match series {
        Ok(series) => series,
        Err(e) => {
            // A failed draw fails every estimator of this replication.
            let message = e.to_string();
            return RepOutcome {
                whittle: config
                    .estimators
                    .contains(&EstimatorKind::Whittle)
                    .then(|| Err(message.clone())),
                lw: config
                    .estimators
                    .contains(&EstimatorKind::Lw)
                    .then(|| Err(message)),
            };
        }
    };
    let mut outcome = RepOutcome::default();
    for est in &config.estimators {
        match est {
            EstimatorKind::Whittle => {
                let fit = estimate_whittle_with(
                    evaluator.expect("evaluator built when whittle is requested"),
                    &series,
                    options,
                );
                outcome.whittle = Some(match fit {
                    Ok(fit) => Ok((fit.h_hat, fit.c_hat, fit.near_boundary)),
                    Err(e) => Err(e.to_string()),
                });
            }
            EstimatorKind::Lw => {
                outcome.lw = Some(match estimate_local_whittle(&series, None) {
                    Ok(fit) => Ok((fit.h_hat, fit.near_boundary)),
                    Err(e) => Err(e.to_string()),
                });
            }
        }
    }
    outcome
}

fn build_cell(
    config: &McConfig,
    estimator: EstimatorKind,
    h: f64,
    n: usize,
    outcomes: &[RepOutcome],
) -> McCell {
    let mut estimates = Vec::with_capacity(outcomes.len());
    let mut scales = Vec::with_capacity(outcomes.len());
    let mut boundary_warnings = 0;
    let mut failures = 0;
    for outcome in outcomes {
        match estimator {
            EstimatorKind::Whittle => match outcome.whittle.as_ref().expect("requested") {
                Ok((h_hat, c_hat, near)) => {
                    estimates.push(*h_hat);
                    scales.push(*c_hat);
                    boundary_warnings += usize::from(*near);
                }
                Err(_) => failures += 1,
            },
            EstimatorKind::Lw => match outcome.lw.as_ref().expect("requested") {
                Ok((h_hat, near)) => {
                    estimates.push(*h_hat);
                    boundary_warnings += usize::from(*near);
                }
                Err(_) => failures += 1,
            },
        }
    }
    let (mean, std, bias, rmse, skewness) = summary_stats(&estimates, h);
    let (scale_mean, scale_std, scale_estimates) = if estimator == EstimatorKind::Whittle {
        let (m, s, _, _, _) = summary_stats(&scales, config.c);
        (Some(m), Some(s), Some(scales))
    } else {
        (None, None, None)
    };
    McCell {
        process: config.process,
        estimator,
        h_true: h,
        n,
        reps: config.reps,
        mean,
        std,
        bias,
        rmse,
        skewness,
        boundary_warnings,
        failures,
        partial: failures > 0,
        estimates,
        scale_mean,
        scale_std,
        scale_estimates,
    }
}

/// Mean, std (n-1), bias, RMSE (divisor n), and skewness against `truth`.
fn summary_stats(xs: &[f64], truth: f64) -> (f64, f64, f64, f64, f64) {
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = stats::mean(xs);
    let std = stats::sample_std(xs);
    let bias = mean - truth;
    let rmse = (xs.iter().map(|x| (x - truth) * (x - truth)).sum::<f64>() / xs.len() as f64).sqrt();
    (mean, std, bias, rmse, stats::skewness(xs))
}

fn header_comments(report: &McReport) -> String {
    format!("# version = {}\n{}", report.version, report.config.echo_comments())
}

/// Six-significant-digit scientific format; reparsing and reformatting a
/// rendered value reproduces the same text.
fn fmt_sig(x: f64) -> String {
    format!("{x:.5e}")
}

/// Aligned-text summary: one block per (process, N), one column per H,
/// mean/std row pairs per estimator.
pub fn render_text_table(report: &McReport) -> String {
    let config = &report.config;
    let mut out = String::new();
    for &n in &config.n_list {
        out.push_str(&format!(
            "process={} N={} reps={} seed={}\n",
            config.process, n, config.reps, config.seed
        ));
        out.push_str(&format!("{:>16}", "H"));
        for &h in &config.h_list {
            out.push_str(&format!("{h:>10.4}"));
        }
        out.push('\n');
        for &est in &config.estimators {
            for (label, field) in [("mean", 0), ("std", 1)] {
                out.push_str(&format!("{:>16}", format!("{est} {label}")));
                for &h in &config.h_list {
                    let cell = report
                        .cells
                        .iter()
                        .find(|c| c.n == n && c.h_true == h && c.estimator == est)
                        .expect("complete report");
                    let value = if field == 0 { cell.mean } else { cell.std };
                    out.push_str(&format!("{value:>10.4}"));
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    out
}

/// Long-format CSV of the per-cell summaries with the config echoed as
/// leading comments.
pub fn render_report_csv(report: &McReport) -> String {
    let mut out = header_comments(report);
    out.push_str(
        "process,estimator,h_true,n,reps,mean,std,bias,rmse,skewness,boundary_warnings,failures\n",
    );
    for cell in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cell.process,
            cell.estimator,
            cell.h_true,
            cell.n,
            cell.reps,
            fmt_sig(cell.mean),
            fmt_sig(cell.std),
            fmt_sig(cell.bias),
            fmt_sig(cell.rmse),
            fmt_sig(cell.skewness),
            cell.boundary_warnings,
            cell.failures,
        ));
    }
    out
}

/// Scaled dispersion of one cell: std times the theoretical rate factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub process: ProcessFamily,
    pub estimator: EstimatorKind,
    pub h_true: f64,
    pub n: usize,
    pub std: f64,
    /// `std * n^{1-H}` for Rosenblatt cells, `std * sqrt(n)` for Gaussian.
    pub scaled_std: f64,
}

/// Observed vs. theoretical dispersion ratio between two lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRatio {
    pub process: ProcessFamily,
    pub estimator: EstimatorKind,
    pub h_true: f64,
    pub n_from: usize,
    pub n_to: usize,
    /// `std(n_to) / std(n_from)`.
    pub observed: f64,
    /// `(n_from / n_to)^{1-H}` (Rosenblatt) or `^{1/2}` (Gaussian).
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub ratios: Vec<RateRatio>,
}

fn rate_exponent(process: ProcessFamily, h: f64) -> f64 {
    match process {
        ProcessFamily::Rosenblatt => 1.0 - h,
        ProcessFamily::Fgn => 0.5,
    }
}

/// Rate diagnostics: if the dispersion follows the theoretical rate, the
/// scaled column is flat in N and observed/theoretical ratios sit near 1.
pub fn rate_check(report: &McReport) -> RateTable {
    let mut rows = Vec::new();
    for cell in &report.cells {
        let expo = rate_exponent(cell.process, cell.h_true);
        rows.push(RateRow {
            process: cell.process,
            estimator: cell.estimator,
            h_true: cell.h_true,
            n: cell.n,
            std: cell.std,
            scaled_std: cell.std * (cell.n as f64).powf(expo),
        });
    }
    let mut ratios = Vec::new();
    for &est in &report.config.estimators {
        for &h in &report.config.h_list {
            let mut group: Vec<&McCell> = report
                .cells
                .iter()
                .filter(|c| c.estimator == est && c.h_true == h)
                .collect();
            group.sort_by_key(|c| c.n);
            for pair in group.windows(2) {
                let (from, to) = (pair[0], pair[1]);
                let expo = rate_exponent(from.process, h);
                ratios.push(RateRatio {
                    process: from.process,
                    estimator: est,
                    h_true: h,
                    n_from: from.n,
                    n_to: to.n,
                    observed: to.std / from.std,
                    theoretical: (from.n as f64 / to.n as f64).powf(expo),
                });
            }
        }
    }
    RateTable { rows, ratios }
}

/// CSV rendering of [`rate_check`]: a scaled-dispersion section followed
/// by a ratio section, separated by comment headers.
pub fn render_rates_csv(report: &McReport) -> String {
    let table = rate_check(report);
    let mut out = header_comments(report);
    out.push_str("# scaled dispersions\n");
    out.push_str("process,estimator,h_true,n,std,scaled_std\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.process,
            row.estimator,
            row.h_true,
            row.n,
            fmt_sig(row.std),
            fmt_sig(row.scaled_std),
        ));
    }
    out.push_str("# dispersion ratios, observed vs theoretical\n");
    out.push_str("process,estimator,h_true,n_from,n_to,observed,theoretical\n");
    for ratio in &table.ratios {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            ratio.process,
            ratio.estimator,
            ratio.h_true,
            ratio.n_from,
            ratio.n_to,
            fmt_sig(ratio.observed),
            fmt_sig(ratio.theoretical),
        ));
    }
    out
}

/// Gaussian kernel density estimate on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl KdeEstimate {
    /// Trapezoidal mass; close to 1 by construction since the grid covers
    /// the sample range plus five bandwidths on each side.
    pub fn integral(&self) -> f64 {
        let step = self.grid[1] - self.grid[0];
        let inner: f64 = self.density[1..self.density.len() - 1].iter().sum();
        step * (inner + 0.5 * (self.density[0] + self.density[self.density.len() - 1]))
    }
}

/// Gaussian-kernel density with the Silverman rule-of-thumb bandwidth
/// `0.9 min(s, IQR/1.34) n^{-1/5}`, evaluated by linear binning and one
/// FFT convolution on a `grid_size`-point grid spanning the sample range
/// plus five bandwidths each side.
pub fn kde_silverman(samples: &[f64], grid_size: usize) -> Result<KdeEstimate> {
    let n = samples.len();
    if n < 8 {
        return Err(LongMemError::DegenerateSample { len: n });
    }
    if grid_size < 16 {
        return Err(LongMemError::Parameter {
            name: "grid_size",
            value: grid_size as f64,
            constraint: "grid_size >= 16",
        });
    }
    for &x in samples {
        if !x.is_finite() {
            return Err(LongMemError::Parameter {
                name: "samples",
                value: x,
                constraint: "all samples finite",
            });
        }
    }
    let spread = stats::sample_std(samples).min(stats::interquartile_range(samples) / 1.34);
    let bandwidth = 0.9 * spread * (n as f64).powf(-0.2);
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(LongMemError::DegenerateSample { len: n });
    }

    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 5.0 * bandwidth;
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 5.0 * bandwidth;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| lo + step * i as f64).collect();

    // Linear binning conserves total mass exactly.
    let mut counts = vec![0.0; grid_size];
    for &x in samples {
        let pos = (x - lo) / step;
        let cell = (pos.floor() as usize).min(grid_size - 1);
        let frac = pos - cell as f64;
        counts[cell] += 1.0 - frac;
        if cell + 1 < grid_size {
            counts[cell + 1] += frac;
        }
    }

    let radius = ((5.0 * bandwidth / step).ceil() as usize).min(grid_size - 1);
    let norm = 1.0 / (bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let kernel: Vec<f64> = (0..=2 * radius)
        .map(|t| {
            let u = (t as f64 - radius as f64) * step / bandwidth;
            norm * (-0.5 * u * u).exp()
        })
        .collect();

    let full = fft::fft_convolve_full(&counts, &kernel);
    let density: Vec<f64> = (0..grid_size)
        .map(|i| (full[i + radius] / n as f64).max(0.0))
        .collect();
    Ok(KdeEstimate {
        grid,
        density,
        bandwidth,
    })
}

/// CSV rendering of a density estimate; `comments` lines are prefixed
/// with `# ` ahead of the header.
pub fn render_kde_csv(kde: &KdeEstimate, comments: &[String]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&format!("# bandwidth = {}\n", kde.bandwidth));
    out.push_str("x,density\n");
    for (x, d) in kde.grid.iter().zip(&kde.density) {
        out.push_str(&format!("{},{}\n", x, fmt_sig(*d)));
    }
    out
}
