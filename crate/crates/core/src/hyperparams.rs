//! Hyper-parameter estimation and the evidence scan over the noise scale.
//!
//! Two estimator families for `(nu, rho, sigma)`: global moments, suited
//! to (near-)Gaussian data, and median/quartile estimators that survive
//! heavy tails and outliers. The in-segment scale comes from successive
//! differences in both cases, which needs no segmentation: differences
//! inside a segment have variance `2 sigma^2`, and the few that straddle a
//! boundary only bias the estimate mildly upward.

use crate::dp_engine::{build_dp, evidence_and_ck};
use crate::error::{Error, Result};
use crate::numerics::NoiseModel;
use crate::segment_evidence::{moment_tables, DataSeries, Hyperparameters};

/// Quartile of the standard prior (`alpha`) and of the self-convolved
/// standard noise (`beta`), used to turn interquartile ranges into scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuartileConstants {
    pub alpha: f64,
    pub beta: f64,
}

/// Upper quartile of the standard normal distribution.
pub const GAUSS_QUARTILE: f64 = 0.6744;

impl QuartileConstants {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::Domain(format!(
                "quartile constants must be positive; got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Constants for the given level-prior and noise families. The
    /// standard Cauchy quartile is exactly 1 and the sum of two standard
    /// Cauchys is Cauchy with scale 2; the normal counterparts are
    /// 0.6744 and 0.6744 sqrt(2).
    pub fn for_models(prior: NoiseModel, noise: NoiseModel) -> Self {
        let alpha = match prior {
            NoiseModel::Gauss => GAUSS_QUARTILE,
            NoiseModel::Cauchy => 1.0,
        };
        let beta = match noise {
            NoiseModel::Gauss => GAUSS_QUARTILE * std::f64::consts::SQRT_2,
            NoiseModel::Cauchy => 2.0,
        };
        Self { alpha, beta }
    }
}

/// Moment estimators: empirical mean/variance for the level prior and
/// half the mean squared successive difference for the noise variance.
pub fn estimate_moments(y: &DataSeries) -> Result<Hyperparameters> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let values = y.values();
    let nu = values.iter().sum::<f64>() / n as f64;
    let rho2 = values.iter().map(|v| (v - nu) * (v - nu)).sum::<f64>() / (n - 1) as f64;
    let sigma2 = values
        .windows(2)
        .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
        .sum::<f64>()
        / (2 * (n - 1)) as f64;
    let floor = y.scale_floor();
    Hyperparameters::new(nu, rho2.sqrt().max(floor), sigma2.sqrt().max(floor))
}

// 1-based "round up" quantile index into a sorted slice: item ceil(a n / b).
fn upper_quantile(sorted: &[f64], num: usize, den: usize) -> f64 {
    let n = sorted.len();
    let idx = (num * n).div_ceil(den);
    sorted[idx.max(1) - 1]
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite data"));
    s
}

/// Median/quartile estimators, robust to outliers: the median for the
/// level location, interquartile ranges of the data and of successive
/// differences for the two scales.
pub fn estimate_quantiles(y: &DataSeries, qc: &QuartileConstants) -> Result<Hyperparameters> {
    let n = y.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    let sorted = sorted_copy(y.values());
    let nu = upper_quantile(&sorted, 1, 2);
    let rho = (upper_quantile(&sorted, 3, 4) - upper_quantile(&sorted, 1, 4)) / (2.0 * qc.alpha);

    let deltas: Vec<f64> = y.values().windows(2).map(|w| w[1] - w[0]).collect();
    let sorted_d = sorted_copy(&deltas);
    let sigma =
        (upper_quantile(&sorted_d, 3, 4) - upper_quantile(&sorted_d, 1, 4)) / (2.0 * qc.beta);

    let floor = y.scale_floor();
    Hyperparameters::new(nu, rho.max(floor), sigma.max(floor))
}

/// One evidence evaluation of the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub sigma: f64,
    pub log_evidence: f64,
    pub k_hat: usize,
}

/// Evidence and MAP segment count as a function of the noise scale, with
/// the level prior `(nu, rho)` held fixed. Each grid point is a full
/// table rebuild plus recursion, so the scan costs `O(|grid| k_max n^2)`.
pub fn evidence_scan(
    y: &DataSeries,
    hp: &Hyperparameters,
    noise: NoiseModel,
    prior: NoiseModel,
    sigma_grid: &[f64],
    k_max: usize,
) -> Result<Vec<ScanPoint>> {
    if sigma_grid.is_empty() {
        return Err(Error::Domain("sigma grid is empty".into()));
    }
    sigma_grid
        .iter()
        .map(|&sigma| {
            let hp_s = hp.with_sigma(sigma)?;
            let mt = moment_tables(y, &hp_s, noise, prior)?;
            let dp = build_dp(&mt, k_max)?;
            let (log_evidence, _, k_hat) = evidence_and_ck(&dp)?;
            Ok(ScanPoint {
                sigma,
                log_evidence,
                k_hat,
            })
        })
        .collect()
}
