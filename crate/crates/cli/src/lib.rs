//! Command-line interface: `fit`, `synth`, `scan` and `check`.
//!
//! Exit codes: 0 success, 1 check failure, 2 input error, 3 internal
//! invariant violation.

pub mod formats;

use bpcr_core::{
    compare_with_dp, estimate_moments, evidence_scan, fit, gaussian_moments, generate,
    CurveMode, DataSeries, Error as CoreError, Estimator, FitOptions, NoiseModel, Profile,
    MAX_ORACLE_N,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Unusable input (file, flag value, data); exit code 2.
    Input(String),
    /// A violated internal invariant; exit code 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Internal(msg) => f.write_str(msg),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateEvidence => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bpcr",
    version,
    about = "Bayesian regression of piecewise constant functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the segmentation posterior to a CSV series
    Fit(FitArgs),
    /// Generate a synthetic benchmark series
    Synth(SynthArgs),
    /// Evidence and MAP segment count over a range of noise scales
    Scan(ScanArgs),
    /// Cross-check the recursions against exhaustive enumeration
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gauss,
    Cauchy,
}

impl From<NoiseArg> for NoiseModel {
    fn from(a: NoiseArg) -> Self {
        match a {
            NoiseArg::Gauss => NoiseModel::Gauss,
            NoiseArg::Cauchy => NoiseModel::Cauchy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Moments,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveArg {
    MapK,
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Gl,
    Gm,
    Gh,
    Cl,
    Cm,
    Ch,
}

impl From<ProfileArg> for Profile {
    fn from(a: ProfileArg) -> Self {
        match a {
            ProfileArg::Gl => Profile::Gl,
            ProfileArg::Gm => Profile::Gm,
            ProfileArg::Gh => Profile::Gh,
            ProfileArg::Cl => Profile::Cl,
            ProfileArg::Cm => Profile::Cm,
            ProfileArg::Ch => Profile::Ch,
        }
    }
}

/// Model flags shared by `fit` and `scan`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Noise model within segments
    #[arg(long, value_enum, default_value_t = NoiseArg::Gauss)]
    pub noise: NoiseArg,
    /// Prior family on segment levels
    #[arg(long, value_enum, default_value_t = NoiseArg::Gauss)]
    pub prior: NoiseArg,
    /// Upper bound on the segment count (default: series length)
    #[arg(long = "kmax")]
    pub kmax: Option<usize>,
    /// Hyper-parameter estimator (default pairs with the noise model)
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    /// Override the level-prior location
    #[arg(long)]
    pub nu: Option<f64>,
    /// Override the level-prior scale
    #[arg(long)]
    pub rho: Option<f64>,
    /// Override the in-segment noise scale
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Subtract the noise variance from the level-prior variance
    #[arg(long)]
    pub rho_subtract: bool,
}

impl ModelArgs {
    fn fit_options(&self, curve: CurveArg) -> FitOptions {
        FitOptions {
            noise: self.noise.into(),
            prior: self.prior.into(),
            k_max: self.kmax,
            estimator: self.estimator.map(|e| match e {
                EstimatorArg::Moments => Estimator::Moments,
                EstimatorArg::Quantile => Estimator::Quantile,
            }),
            nu: self.nu,
            rho: self.rho,
            sigma: self.sigma,
            rho_subtract: self.rho_subtract,
            curve: match curve {
                CurveArg::MapK => CurveMode::MapK,
                CurveArg::Mixture => CurveMode::Mixture,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV: one value per row, optional `y` header
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Regression-curve averaging mode
    #[arg(long, value_enum, default_value_t = CurveArg::MapK)]
    pub curve: CurveArg,
    /// Output directory for result.json, curve.csv and breaks.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Benchmark profile
    #[arg(long, value_enum)]
    pub profile: ProfileArg,
    /// RNG seed (default: the profile's versioned seed)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Series length
    #[arg(long, default_value_t = 100)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Input CSV: one value per row, optional `y` header
    #[arg(long)]
    pub input: PathBuf,
    /// Smallest noise scale in the scan
    #[arg(long)]
    pub sigma_min: f64,
    /// Largest noise scale in the scan
    #[arg(long)]
    pub sigma_max: f64,
    /// Number of scan grid points
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Largest series length to cross-check
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Random instances per length
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Base RNG seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest tolerated relative deviation
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fit(args) => cmd_fit(&args).map(|()| 0),
        Command::Synth(args) => cmd_synth(&args).map(|()| 0),
        Command::Scan(args) => cmd_scan(&args).map(|()| 0),
        Command::Check(args) => cmd_check(&args),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let y = formats::read_series_csv(&args.input)?;
    let opts = args.model.fit_options(args.curve);
    let report = fit(&y, &opts)?;
    report
        .result
        .validate()
        .map_err(|e| CliError::Internal(e.to_string()))?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    let doc = formats::ResultDoc::from_report(&report);
    write_file(&args.out.join("result.json"), &formats::to_canonical_json(&doc)?)?;
    write_file(
        &args.out.join("curve.csv"),
        formats::curve_csv(&y, &report).as_bytes(),
    )?;
    write_file(
        &args.out.join("breaks.csv"),
        formats::breaks_csv(&report).as_bytes(),
    )?;

    println!(
        "n={} k_hat={} t_hat={:?} log_evidence={:.4} (nu={:.4}, rho={:.4}, sigma={:.4})",
        report.n,
        report.result.k_hat,
        report.result.t_hat,
        report.result.log_evidence,
        report.hyperparameters.nu,
        report.hyperparameters.rho,
        report.hyperparameters.sigma,
    );
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let profile: Profile = args.profile.into();
    let seed = args.seed.unwrap_or_else(|| profile.default_seed());
    let (y, truth) = generate(profile, seed, args.n)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }
    write_file(&args.out, formats::series_csv(&y).as_bytes())?;
    println!(
        "profile={} n={} seed={} boundaries={:?} levels={:?} sigma={}",
        profile.name(),
        args.n,
        seed,
        truth.boundaries,
        truth.levels,
        truth.noise_scale,
    );
    Ok(())
}

pub fn cmd_scan(args: &ScanArgs) -> Result<(), CliError> {
    if !args.sigma_min.is_finite()
        || !args.sigma_max.is_finite()
        || args.sigma_min <= 0.0
        || args.sigma_min >= args.sigma_max
    {
        return Err(CliError::Input(format!(
            "scan needs 0 < sigma-min < sigma-max; got [{}, {}]",
            args.sigma_min, args.sigma_max
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Input(format!(
            "scan needs at least 2 steps; got {}",
            args.steps
        )));
    }
    let y = formats::read_series_csv(&args.input)?;
    let opts = args.model.fit_options(CurveArg::MapK);
    let (hp, _) = bpcr_core::fit::resolve_hyperparameters(&y, &opts)?;
    let k_max = opts.k_max.unwrap_or(y.len()).min(y.len()).max(1);

    // The scan grid plus the estimated scale, so the marked row is part
    // of the output.
    let span = args.sigma_max - args.sigma_min;
    let mut sigmas: Vec<f64> = (0..args.steps)
        .map(|i| args.sigma_min + span * i as f64 / (args.steps - 1) as f64)
        .collect();
    if !sigmas.contains(&hp.sigma) {
        sigmas.push(hp.sigma);
    }
    sigmas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let points = evidence_scan(&y, &hp, opts.noise, opts.prior, &sigmas, k_max)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }
    write_file(&args.out, formats::scan_csv(&points, hp.sigma).as_bytes())?;

    let best = points
        .iter()
        .max_by(|a, b| a.log_evidence.partial_cmp(&b.log_evidence).unwrap())
        .expect("non-empty scan");
    println!(
        "scanned {} scales in [{}, {}]; argmax log-evidence at sigma={:.6} (k_hat={}), estimate sigma_hat={:.6}",
        points.len(),
        args.sigma_min,
        args.sigma_max,
        best.sigma,
        best.k_hat,
        hp.sigma,
    );
    Ok(())
}

pub fn cmd_check(args: &CheckArgs) -> Result<i32, CliError> {
    if args.n_max > MAX_ORACLE_N {
        return Err(CliError::Input(format!(
            "check is limited to n-max <= {MAX_ORACLE_N}; got {}",
            args.n_max
        )));
    }
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        return Err(CliError::Input(format!(
            "tolerance must be >= 0; got {}",
            args.tolerance
        )));
    }
    let mut worst = 0.0f64;
    for n in 2..=args.n_max {
        let mut n_worst = 0.0f64;
        for trial in 0..args.trials {
            let mut rng =
                ChaCha8Rng::seed_from_u64(args.seed ^ ((n * 10_000 + trial) as u64));
            let y = DataSeries::new(
                (0..n)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            )?;
            let hp = estimate_moments(&y)?;
            let mt = gaussian_moments(&y, &hp);
            n_worst = n_worst.max(compare_with_dp(&mt, n)?);
        }
        println!(
            "n={n}: max relative deviation {n_worst:.3e} over {} instances",
            args.trials
        );
        worst = worst.max(n_worst);
    }
    println!(
        "overall max relative deviation {worst:.3e} (tolerance {:.1e})",
        args.tolerance
    );
    Ok(if worst <= args.tolerance { 0 } else { 1 })
}
