//! End-to-end fit: estimate hyper-parameters, build the interval
//! evidences and recursions, and extract every posterior summary.

use crate::dp_engine::{
    boundary_posterior, build_dp, evidence_and_ck, loglik_diagnostics, piecewise_fit,
    regression_curve, regression_curve_mixture, segment_levels, LogLikDiagnostics,
    SegmentEstimate,
};
use crate::error::{Error, Result};
use crate::hyperparams::{estimate_moments, estimate_quantiles, QuartileConstants};
use crate::numerics::NoiseModel;
use crate::segment_evidence::{moment_tables, DataSeries, Hyperparameters};

/// Which hyper-parameter estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Moments,
    Quantile,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Moments => "moments",
            Estimator::Quantile => "quantile",
        }
    }

    /// Default pairing: moments for Gaussian noise, quantiles for
    /// anything heavy-tailed.
    pub fn default_for(noise: NoiseModel) -> Self {
        match noise {
            NoiseModel::Gauss => Estimator::Moments,
            NoiseModel::Cauchy => Estimator::Quantile,
        }
    }
}

/// Whether the regression curve conditions on the MAP segment count or
/// mixes over all counts weighted by their posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurveMode {
    #[default]
    MapK,
    Mixture,
}

impl CurveMode {
    pub fn name(self) -> &'static str {
        match self {
            CurveMode::MapK => "map-k",
            CurveMode::Mixture => "mixture",
        }
    }
}

/// Fit configuration. `None` fields fall back to data-driven defaults.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub noise: NoiseModel,
    pub prior: NoiseModel,
    /// Upper bound on the segment count; default n (clamped to n).
    /// With the full range, a near-zero noise scale makes every point
    /// its own segment; cap this or pin `sigma` if that happens.
    pub k_max: Option<usize>,
    pub estimator: Option<Estimator>,
    pub nu: Option<f64>,
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    /// Subtract the estimated in-segment variance from the level-prior
    /// variance (floored), since the raw estimate includes both.
    pub rho_subtract: bool,
    pub curve: CurveMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            noise: NoiseModel::Gauss,
            prior: NoiseModel::Gauss,
            k_max: None,
            estimator: None,
            nu: None,
            rho: None,
            sigma: None,
            rho_subtract: false,
            curve: CurveMode::MapK,
        }
    }
}

/// Full posterior summary of one fit.
#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub log_evidence: f64,
    /// `ck[k-1] = P(k segments | y)` for k = 1..k_max.
    pub ck: Vec<f64>,
    pub k_hat: usize,
    /// `(k_hat+1) x (n+1)` boundary location posterior.
    pub boundary_posterior: Vec<Vec<f64>>,
    /// Aggregate inner-break probability per position, length n+1.
    pub b_total: Vec<f64>,
    /// MAP boundary vector, `t_hat[0] = 0`, `t_hat[k_hat] = n`.
    pub t_hat: Vec<usize>,
    pub segments: Vec<SegmentEstimate>,
    /// Regression curve, length n.
    pub curve_mean: Vec<f64>,
    pub curve_std: Vec<f64>,
    /// Total segment mass covering each position; 1 up to rounding.
    pub curve_mass: Vec<f64>,
    pub loglik: LogLikDiagnostics,
}

impl RegressionResult {
    /// Check the normalization identities every fit must satisfy.
    pub fn validate(&self) -> Result<()> {
        let ck_total: f64 = self.ck.iter().sum();
        if (ck_total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "segment-count posterior sums to {ck_total}, not 1"
            )));
        }
        for (p, row) in self.boundary_posterior.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Domain(format!(
                    "boundary posterior row {p} sums to {sum}, not 1"
                )));
            }
        }
        for (t, &m) in self.curve_mass.iter().enumerate() {
            if (m - 1.0).abs() > 1e-6 {
                return Err(Error::Domain(format!(
                    "curve segment mass at position {} is {m}, not 1",
                    t + 1
                )));
            }
        }
        if self.curve_std.iter().any(|&s| s.is_nan() || s < 0.0) {
            return Err(Error::Domain("negative curve standard deviation".into()));
        }
        Ok(())
    }
}

/// A fit report: the result plus everything that parameterized it.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub n: usize,
    pub noise: NoiseModel,
    pub prior: NoiseModel,
    pub estimator: Estimator,
    pub k_max: usize,
    pub hyperparameters: Hyperparameters,
    pub curve_mode: CurveMode,
    pub result: RegressionResult,
}

/// Resolve the hyper-parameters for a fit: run the configured estimator,
/// optionally subtract the noise variance from the level variance, then
/// apply explicit overrides.
///
/// Series shorter than the chosen estimator's minimum fall back to the
/// moment estimator, and a single point to `(y_1, floor, floor)`, so
/// that a fit works on any non-empty input.
pub fn resolve_hyperparameters(
    y: &DataSeries,
    opts: &FitOptions,
) -> Result<(Hyperparameters, Estimator)> {
    let estimator = opts.estimator.unwrap_or(Estimator::default_for(opts.noise));
    let attempted = match estimator {
        Estimator::Moments => estimate_moments(y),
        Estimator::Quantile => {
            estimate_quantiles(y, &QuartileConstants::for_models(opts.prior, opts.noise))
        }
    };
    let estimated = match attempted {
        Ok(hp) => hp,
        Err(Error::InsufficientData { .. }) => {
            if y.len() >= 2 {
                estimate_moments(y)?
            } else {
                let floor = y.scale_floor();
                Hyperparameters::new(y.values()[0], floor, floor)?
            }
        }
        Err(e) => return Err(e),
    };
    let mut nu = estimated.nu;
    let mut rho = estimated.rho;
    let mut sigma = estimated.sigma;
    if opts.rho_subtract {
        let floor = y.scale_floor();
        rho = (rho * rho - sigma * sigma).max(floor * floor).sqrt();
    }
    if let Some(v) = opts.nu {
        nu = v;
    }
    if let Some(v) = opts.rho {
        rho = v;
    }
    if let Some(v) = opts.sigma {
        sigma = v;
    }
    Ok((Hyperparameters::new(nu, rho, sigma)?, estimator))
}

/// Run the whole pipeline on one series.
pub fn fit(y: &DataSeries, opts: &FitOptions) -> Result<FitReport> {
    let n = y.len();
    let (hp, estimator) = resolve_hyperparameters(y, opts)?;
    let k_max = opts.k_max.unwrap_or(n).min(n).max(1);

    let mt = moment_tables(y, &hp, opts.noise, opts.prior)?;
    let dp = build_dp(&mt, k_max)?;
    let (log_evidence, ck, k_hat) = evidence_and_ck(&dp)?;
    let (boundary, b_total, t_hat) = boundary_posterior(&dp, k_hat)?;
    let segments = segment_levels(&mt, &t_hat);
    let curve = match opts.curve {
        CurveMode::MapK => regression_curve(&mt, &dp, k_hat)?,
        CurveMode::Mixture => regression_curve_mixture(&mt, &dp, &ck)?,
    };
    let fitted = piecewise_fit(&segments, n);
    let loglik = loglik_diagnostics(y, &fitted, hp.sigma, opts.noise);

    Ok(FitReport {
        n,
        noise: opts.noise,
        prior: opts.prior,
        estimator,
        k_max,
        hyperparameters: hp,
        curve_mode: opts.curve,
        result: RegressionResult {
            log_evidence,
            ck,
            k_hat,
            boundary_posterior: boundary,
            b_total,
            t_hat,
            segments,
            curve_mean: curve.mean,
            curve_std: curve.std,
            curve_mass: curve.mass,
            loglik,
        },
    })
}
