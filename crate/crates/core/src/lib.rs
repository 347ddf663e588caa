//! Exact Bayesian regression of piecewise constant functions.
//!
//! Given a one-dimensional series with an unknown number of constant
//! segments, unknown boundaries and unknown levels, this crate computes
//! the exact posterior summaries in `O(k_max n^2)` time: the data
//! evidence, the distribution over the segment count, per-boundary
//! location posteriors with MAP estimates, segment level moments, a
//! Bayesian regression curve with error bands, and log-likelihood
//! diagnostics. Gaussian noise/prior pairs use a closed form; Cauchy and
//! other symmetric location-scale models go through grid quadrature.

#![forbid(unsafe_code)]

pub mod dp_engine;
pub mod error;
pub mod fit;
pub mod hyperparams;
pub mod numerics;
pub mod oracle;
pub mod segment_evidence;
pub mod synthgen;

pub use dp_engine::{
    boundary_posterior, build_dp, evidence_and_ck, loglik_diagnostics, piecewise_fit,
    regression_curve, regression_curve_mixture, segment_levels, DpTables, LogLikDiagnostics,
    RegressionCurve, SegmentEstimate,
};
pub use error::{Error, Result};
pub use fit::{fit, CurveMode, Estimator, FitOptions, FitReport, RegressionResult};
pub use hyperparams::{
    estimate_moments, estimate_quantiles, evidence_scan, QuartileConstants, ScanPoint,
};
pub use numerics::{log_binomial, log_density, log_sum_exp, log_sum_exp_slice, Density, NoiseModel};
pub use oracle::{compare_with_dp, enumerate_posterior, OracleResult, MAX_ORACLE_N};
pub use segment_evidence::{
    gaussian_moments, grid_moments, moment_tables, DataSeries, GridSpec, Hyperparameters,
    MomentTables,
};
pub use synthgen::{generate, GroundTruth, Profile};
