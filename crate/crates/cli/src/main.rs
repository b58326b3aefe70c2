//! Command-line surface over the longmem library: path simulation,
//! periodograms, Whittle fits, replication studies, kernel density
//! estimates, and spectral tables.
//!
//! Every run echoes its resolved configuration to stderr before doing any
//! work, data outputs go to stdout or to files written atomically
//! (temp-file-plus-rename), and failures exit with a category-specific
//! code documented in `--help`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use longmem::experiments::{self, kde_silverman, run_monte_carlo, McConfig};
use longmem::simulate::{
    simulate_farima, simulate_fgn, simulate_rosenblatt_increments, SeedSpec, TimeSeries,
};
use longmem::spectral::{LongMemoryParams, SpectralConfig, SpectralModel};
use longmem::{
    estimate_local_whittle, estimate_whittle, LongMemError, WhittleOptions,
};
use longmem::periodogram::periodogram_grid;

const EXIT_CODE_HELP: &str = "\
Exit codes:
  0  success
  2  command-line usage error
  3  unreadable or malformed input (series CSV, config file, environment)
  4  parameter outside its mathematical domain
  5  file system failure
  6  computation failed (degenerate input, unstable derivative, embedding)";

#[derive(Parser)]
#[command(
    name = "longmem",
    version,
    about = "Simulation and Whittle estimation for long-memory increment processes",
    after_help = EXIT_CODE_HELP,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a seeded sample path and write it as one value per line.
    Simulate(SimulateArgs),
    /// Periodogram of a series on the half-frequency grid pi k / N.
    Periodogram(PeriodogramArgs),
    /// Fit H (and C for the parametric estimator) to a series.
    Estimate(EstimateArgs),
    /// Run a replication study from a config file.
    Mc(McArgs),
    /// Kernel density estimate of a sample file.
    Kde(KdeArgs),
    /// Tabulate the spectral density or the covariance sequence.
    SpectralTable(SpectralTableArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProcessArg {
    Rosenblatt,
    Fgn,
    Farima,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Whittle,
    Lw,
}

#[derive(Args)]
struct SimulateArgs {
    /// Process family to draw from.
    #[arg(long, value_enum)]
    process: ProcessArg,
    /// Hurst index in (1/2, 1) (rosenblatt, fgn; fgn accepts (0, 1)).
    #[arg(long)]
    h: Option<f64>,
    /// Memory parameter in (0, 1/2) (farima only).
    #[arg(long)]
    d: Option<f64>,
    /// Series length.
    #[arg(long)]
    n: usize,
    /// Scale of the increments (rosenblatt only).
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Block length per increment (rosenblatt only).
    #[arg(long, default_value_t = 256)]
    n_inner: usize,
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stream index under the master seed (replication number).
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PeriodogramArgs {
    /// Input series, one value per line ('#' lines ignored).
    #[arg(short, long)]
    input: PathBuf,
    /// Skip mean correction before transforming.
    #[arg(long)]
    raw: bool,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input series, one value per line ('#' lines ignored).
    #[arg(short, long)]
    input: PathBuf,
    /// Which estimator to run.
    #[arg(long, value_enum, default_value_t = EstimatorArg::Whittle)]
    estimator: EstimatorArg,
    /// Coarse search grid step (whittle).
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    /// Distance kept from the endpoints of (1/2, 1) (whittle).
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Frequencies used by the local Whittle fit; floor(N^0.65) if unset.
    #[arg(long)]
    lw_m: Option<usize>,
    /// Also write the JSON fit record to a file.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    /// Flat key-value config file (see `mc --help` notes in the README).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json, table.csv, rates.csv, kde_<H>_<N>.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; overrides LONGMEM_WORKERS; default all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the replication count from the config file.
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args)]
struct KdeArgs {
    /// Input samples, one value per line ('#' lines ignored).
    #[arg(short, long)]
    input: PathBuf,
    /// Number of grid points.
    #[arg(long, default_value_t = 512)]
    grid_size: usize,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// lambda, spectral density, normalized density.
    Density,
    /// lag, covariance.
    Covariance,
}

#[derive(Args)]
struct SpectralTableArgs {
    /// Hurst index in (1/2, 1).
    #[arg(long)]
    h: f64,
    /// Scale parameter.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Which table to emit.
    #[arg(long, value_enum, default_value_t = TableKind::Density)]
    what: TableKind,
    /// Grid points over (0, pi] (density) .
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Largest lag (covariance).
    #[arg(long, default_value_t = 50)]
    max_lag: i64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failure category carrying the process exit code.
enum CliError {
    /// Unreadable or malformed input data (exit 3).
    Input(String),
    /// Parameter outside its mathematical domain (exit 4).
    Domain(String),
    /// File system failure (exit 5).
    Io(String),
    /// Computation failed on valid input (exit 6).
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Io(_) => 5,
            CliError::Compute(_) => 6,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
            CliError::Compute(_) => "compute",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Domain(m) | CliError::Io(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<LongMemError> for CliError {
    fn from(err: LongMemError) -> Self {
        let message = err.to_string();
        match err {
            LongMemError::Config { .. } => CliError::Input(message),
            LongMemError::Parameter { .. }
            | LongMemError::ZeroFrequency
            | LongMemError::LagOutOfRange { .. }
            | LongMemError::SeriesTooShort { .. }
            | LongMemError::Bandwidth { .. } => CliError::Domain(message),
            LongMemError::DegenerateSeries
            | LongMemError::DegenerateSample { .. }
            | LongMemError::Truncation { .. }
            | LongMemError::EmbeddingFailure { .. }
            | LongMemError::WeightEvaluation { .. }
            | LongMemError::DerivativeInstability { .. } => CliError::Compute(message),
        }
    }
}

fn io_err(context: &str, path: &Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{context} {}: {err}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Periodogram(args) => cmd_periodogram(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Mc(args) => cmd_mc(args),
        Command::Kde(args) => cmd_kde(args),
        Command::SpectralTable(args) => cmd_spectral_table(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("longmem: error[{}]: {}", err.category(), err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

/// Resolved-configuration echo; stderr so piped data stays clean.
fn echo_config(lines: &[(&str, String)]) {
    let mut out = String::from("resolved:");
    for (key, value) in lines {
        let _ = write!(out, " {key}={value}");
    }
    eprintln!("{out}");
}

/// Writes to a sibling temp file and renames, so a failed run never
/// leaves a partial output at the destination.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp-partial");
    let mut file = fs::File::create(&tmp).map_err(|e| io_err("cannot create", &tmp, e))?;
    file.write_all(contents.as_bytes())
        .and_then(|_| file.sync_all())
        .map_err(|e| io_err("cannot write", &tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| io_err("cannot move output into", path, e))
}

fn emit(output: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// One float per line; blank lines and '#' comments are skipped.
fn read_values(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| {
            CliError::Input(format!(
                "{}:{}: not a number: '{line}'",
                path.display(),
                idx + 1
            ))
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no data lines",
            path.display()
        )));
    }
    Ok(values)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let require_h = || {
        args.h.ok_or_else(|| {
            CliError::Domain("--h is required for this process".to_string())
        })
    };
    let seed = SeedSpec::new(args.seed, args.stream);
    let (label, param_desc, series): (&str, String, TimeSeries) = match args.process {
        ProcessArg::Rosenblatt => {
            let h = require_h()?;
            let series = simulate_rosenblatt_increments(h, args.n, args.n_inner, args.c, &seed)?;
            (
                "rosenblatt",
                format!("h={h} c={} n_inner={}", args.c, args.n_inner),
                series,
            )
        }
        ProcessArg::Fgn => {
            let h = require_h()?;
            let series = simulate_fgn(h, args.n, &seed)?;
            ("fgn", format!("h={h}"), series)
        }
        ProcessArg::Farima => {
            let d = args.d.ok_or_else(|| {
                CliError::Domain("--d is required for process farima".to_string())
            })?;
            let series = simulate_farima(d, args.n, None, &seed)?;
            ("farima", format!("d={d}"), series)
        }
    };
    echo_config(&[
        ("process", label.to_string()),
        ("params", param_desc.clone()),
        ("n", args.n.to_string()),
        ("seed", args.seed.to_string()),
        ("stream", args.stream.to_string()),
    ]);
    let mut out = format!(
        "# process = {label}\n# {param_desc}\n# n = {}\n# seed = {}\n# stream = {}\n",
        args.n, args.seed, args.stream
    );
    for v in series.values() {
        let _ = writeln!(out, "{v}");
    }
    emit(args.output.as_ref(), &out)?;
    // File output gets a machine-readable provenance sidecar.
    if let Some(path) = &args.output {
        let record = serde_json::json!({
            "n": series.len(),
            "meta": series.meta(),
        });
        let mut text =
            serde_json::to_string_pretty(&record).expect("json of plain values");
        text.push('\n');
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".meta.json");
        write_atomic(Path::new(&sidecar), &text)?;
    }
    Ok(())
}

fn cmd_periodogram(args: PeriodogramArgs) -> Result<(), CliError> {
    let values = read_values(&args.input)?;
    echo_config(&[
        ("input", args.input.display().to_string()),
        ("n", values.len().to_string()),
        ("mean_correct", (!args.raw).to_string()),
    ]);
    let grid = periodogram_grid(&values, !args.raw)?;
    let mut out = format!(
        "# n = {}\n# mean_corrected = {}\nlambda,ordinate\n",
        grid.n(),
        grid.mean_corrected()
    );
    for (lambda, ordinate) in grid.frequencies().iter().zip(grid.ordinates()) {
        let _ = writeln!(out, "{lambda},{ordinate}");
    }
    emit(args.output.as_ref(), &out)
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let values = read_values(&args.input)?;
    let series = TimeSeries::from_values(values)?;
    let estimator = match args.estimator {
        EstimatorArg::Whittle => "whittle",
        EstimatorArg::Lw => "lw",
    };
    echo_config(&[
        ("input", args.input.display().to_string()),
        ("n", series.len().to_string()),
        ("estimator", estimator.to_string()),
        ("grid_step", args.grid_step.to_string()),
        ("eps", args.eps.to_string()),
        (
            "lw_m",
            args.lw_m.map_or_else(|| "auto".to_string(), |m| m.to_string()),
        ),
    ]);
    let record = match args.estimator {
        EstimatorArg::Whittle => {
            let options = WhittleOptions {
                grid_step: args.grid_step,
                boundary_margin: args.eps,
                ..Default::default()
            };
            let fit = estimate_whittle(&series, &options)?;
            let warnings: Vec<String> = if fit.near_boundary {
                vec!["estimate within 2*eps of the search boundary".to_string()]
            } else {
                Vec::new()
            };
            serde_json::json!({
                "estimator": "whittle",
                "n": series.len(),
                "h_hat": fit.h_hat,
                "sigma2_hat": fit.sigma2_hat,
                "c_hat": fit.c_hat,
                "objective": fit.objective,
                "n_evals": fit.n_evaluations,
                "bracket": [fit.bracket.0, fit.bracket.1],
                "warnings": warnings,
            })
        }
        EstimatorArg::Lw => {
            let fit = estimate_local_whittle(&series, args.lw_m)?;
            let warnings: Vec<String> = if fit.near_boundary {
                vec!["estimate within 2e-3 of the search boundary".to_string()]
            } else {
                Vec::new()
            };
            serde_json::json!({
                "estimator": "lw",
                "n": series.len(),
                "h_hat": fit.h_hat,
                "d_hat": fit.d_hat,
                "bandwidth": fit.bandwidth,
                "objective": fit.objective,
                "n_evals": fit.n_evaluations,
                "warnings": warnings,
            })
        }
    };
    let mut text = serde_json::to_string_pretty(&record).expect("json of plain values");
    text.push('\n');
    println!("{}", text.trim_end());
    if let Some(path) = &args.output {
        write_atomic(path, &text)?;
    }
    Ok(())
}

fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("LONGMEM_WORKERS") {
        Ok(raw) => {
            let count: usize = raw.parse().map_err(|_| {
                CliError::Input(format!("LONGMEM_WORKERS: not a thread count: '{raw}'"))
            })?;
            if count == 0 {
                return Err(CliError::Input(
                    "LONGMEM_WORKERS: thread count must be positive".to_string(),
                ));
            }
            Ok(Some(count))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Input(format!("LONGMEM_WORKERS: {e}"))),
    }
}

fn cmd_mc(args: McArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = McConfig::parse(&text)?;
    if let Some(reps) = args.reps {
        config.reps = reps;
        config.validate()?;
    }
    let workers = resolve_workers(args.workers)?;
    echo_config(&[
        ("config", args.config.display().to_string()),
        ("process", config.process.to_string()),
        (
            "h_list",
            config
                .h_list
                .iter()
                .map(|h| h.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        (
            "n_list",
            config
                .n_list
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("reps", config.reps.to_string()),
        ("n_inner", config.n_inner.to_string()),
        ("c", config.c.to_string()),
        (
            "estimators",
            config
                .estimators
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("seed", config.seed.to_string()),
        (
            "workers",
            workers.map_or_else(|| "all-cores".to_string(), |w| w.to_string()),
        ),
        ("out_dir", args.out_dir.display().to_string()),
    ]);

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| io_err("cannot create directory", &args.out_dir, e))?;
    let report = run_monte_carlo(&config, workers)?;

    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_atomic(&args.out_dir.join("report.json"), &json)?;
    write_atomic(
        &args.out_dir.join("table.csv"),
        &experiments::render_report_csv(&report),
    )?;
    write_atomic(
        &args.out_dir.join("rates.csv"),
        &experiments::render_rates_csv(&report),
    )?;

    // One sampling-distribution density per cell of the leading estimator.
    let kde_estimator = config.estimators[0];
    for cell in report
        .cells
        .iter()
        .filter(|c| c.estimator == kde_estimator && c.estimates.len() >= 8)
    {
        let kde = match kde_silverman(&cell.estimates, 512) {
            Ok(kde) => kde,
            Err(e) => {
                eprintln!(
                    "longmem: note: kde skipped for H={} N={}: {e}",
                    cell.h_true, cell.n
                );
                continue;
            }
        };
        let mut comments: Vec<String> = config
            .echo_comments()
            .lines()
            .map(|l| l.trim_start_matches("# ").to_string())
            .collect();
        comments.push(format!("estimator = {}", cell.estimator));
        comments.push(format!("h_true = {}", cell.h_true));
        comments.push(format!("n = {}", cell.n));
        let name = format!("kde_{}_{}.csv", cell.h_true, cell.n);
        write_atomic(
            &args.out_dir.join(name),
            &experiments::render_kde_csv(&kde, &comments),
        )?;
    }

    print!("{}", experiments::render_text_table(&report));
    eprintln!(
        "longmem: wrote report.json, table.csv, rates.csv to {} in {:.1}s",
        args.out_dir.display(),
        report.wall_seconds
    );
    Ok(())
}

fn cmd_kde(args: KdeArgs) -> Result<(), CliError> {
    let samples = read_values(&args.input)?;
    echo_config(&[
        ("input", args.input.display().to_string()),
        ("samples", samples.len().to_string()),
        ("grid_size", args.grid_size.to_string()),
    ]);
    let kde = kde_silverman(&samples, args.grid_size)?;
    let comments = vec![
        format!("input = {}", args.input.display()),
        format!("samples = {}", samples.len()),
    ];
    emit(
        args.output.as_ref(),
        &experiments::render_kde_csv(&kde, &comments),
    )
}

fn cmd_spectral_table(args: SpectralTableArgs) -> Result<(), CliError> {
    let params = LongMemoryParams::new(args.h, args.c)?;
    let model = SpectralModel::new(params, SpectralConfig::default())?;
    let what = match args.what {
        TableKind::Density => "density",
        TableKind::Covariance => "covariance",
    };
    echo_config(&[
        ("h", args.h.to_string()),
        ("c", args.c.to_string()),
        ("what", what.to_string()),
        ("points", args.points.to_string()),
        ("max_lag", args.max_lag.to_string()),
    ]);
    let mut out = format!("# h = {}\n# c = {}\n", args.h, args.c);
    match args.what {
        TableKind::Density => {
            if args.points == 0 {
                return Err(CliError::Domain("--points must be positive".to_string()));
            }
            out.push_str("lambda,density,normalized_density\n");
            for k in 1..=args.points {
                let lambda = std::f64::consts::PI * k as f64 / args.points as f64;
                let f = model.spectral_density(lambda)?;
                let g = model.normalized_density(lambda)?;
                let _ = writeln!(out, "{lambda},{f},{g}");
            }
        }
        TableKind::Covariance => {
            if args.max_lag < 0 {
                return Err(CliError::Domain("--max-lag must be nonnegative".to_string()));
            }
            out.push_str("lag,covariance\n");
            for lag in 0..=args.max_lag {
                let _ = writeln!(out, "{lag},{}", model.autocovariance(lag));
            }
        }
    }
    emit(args.output.as_ref(), &out)
}
