//! Log-space arithmetic and probability density kernels.
//!
//! Evidence terms are exponentially large or tiny in the series length, so
//! every probability-like quantity is stored as its natural logarithm in a
//! plain `f64`. Zero mass is encoded as `f64::NEG_INFINITY`; `NaN` never
//! enters or leaves these functions for valid inputs.

use crate::error::{Error, Result};

/// log(2π), used by the Gaussian kernels.
pub const LN_2PI: f64 = 1.8378770664093453;

/// log(e^a + e^b), stable for any mix of finite and `-inf` inputs.
#[inline(always)]
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log Σ e^{x_i} over a slice; `-inf` for an empty slice or all-zero mass.
pub fn log_sum_exp_slice(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// log of the binomial coefficient C(n, k) via log-gamma.
///
/// Symmetric in k and n-k exactly (the smaller index is canonical).
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!(
            "binomial coefficient needs k <= n; got k={k}, n={n}"
        )));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    let lg = statrs::function::gamma::ln_gamma;
    Ok(lg(n as f64 + 1.0) - lg(k as f64 + 1.0) - lg((n - k) as f64 + 1.0))
}

/// Noise / segment-level model kind. Both are symmetric location-scale
/// families; any other such density can be plugged in through [`Density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    Gauss,
    Cauchy,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Gauss => "gauss",
            NoiseModel::Cauchy => "cauchy",
        }
    }
}

/// A symmetric location-scale log-density, evaluable pointwise.
///
/// Implementations may assume `scale > 0` and finite `x`, `location`;
/// callers validate once up front (see [`log_density`]).
pub trait Density {
    fn log_density(&self, x: f64, location: f64, scale: f64) -> f64;
}

impl Density for NoiseModel {
    #[inline(always)]
    fn log_density(&self, x: f64, location: f64, scale: f64) -> f64 {
        let dev = x - location;
        match self {
            // -(x-mu)^2 / 2s^2 - log(2 pi s^2) / 2
            NoiseModel::Gauss => {
                let z = dev / scale;
                -0.5 * z * z - 0.5 * LN_2PI - scale.ln()
            }
            // log(s/pi) - log(s^2 + (x-mu)^2)
            NoiseModel::Cauchy => {
                (scale / std::f64::consts::PI).ln() - (scale * scale + dev * dev).ln()
            }
        }
    }
}

/// Checked log-density: validates the scale and finiteness of the inputs.
pub fn log_density(kind: NoiseModel, x: f64, location: f64, scale: f64) -> Result<f64> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Domain(format!(
            "density scale must be positive and finite; got {scale}"
        )));
    }
    if !x.is_finite() || !location.is_finite() {
        return Err(Error::Domain(format!(
            "density arguments must be finite; got x={x}, location={location}"
        )));
    }
    Ok(kind.log_density(x, location, scale))
}
