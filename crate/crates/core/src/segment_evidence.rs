//! Single-segment evidence and level moments for every interval.
//!
//! For each `0 <= i < j <= n` we need the marginal probability of the data
//! slice `y[i+1..=j]` under one level drawn from the prior, together with
//! the posterior first and second moments of that level. The Gaussian
//! noise/prior pair has a closed form; every other pairing is integrated
//! on a uniform grid. Tables store `log A0` plus the linear-space moment
//! ratios `A1/A0` and `A2/A0`, which stay O(data scale) even when the
//! evidence itself underflows.

use crate::error::{Error, Result};
use crate::numerics::{Density, NoiseModel, LN_2PI};

/// Relative floor applied to estimated scales, as a fraction of the data
/// range (of 1.0 for constant data). A zero in-segment scale would make
/// every point its own segment with unbounded evidence.
pub const SCALE_FLOOR_FRACTION: f64 = 1e-12;

/// Hard cap on integration grid size, to keep pathological scale
/// estimates from exhausting memory.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// An observation series `y_1..y_n`; entries are validated finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSeries {
    values: Vec<f64>,
}

impl DataSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("series is empty".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value {} at position {}",
                values[pos],
                pos + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Series with the observation order reversed.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }

    /// Scale floor for this data: a tiny fraction of the value range.
    pub fn scale_floor(&self) -> f64 {
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let range = max - min;
        SCALE_FLOOR_FRACTION * if range > 0.0 { range } else { 1.0 }
    }
}

/// Level-prior location `nu`, level-prior scale `rho`, in-segment noise
/// scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub nu: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl Hyperparameters {
    pub fn new(nu: f64, rho: f64, sigma: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::Domain(format!("nu must be finite; got {nu}")));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::Domain(format!("rho must be positive; got {rho}")));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!("sigma must be positive; got {sigma}")));
        }
        Ok(Self { nu, rho, sigma })
    }

    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        Self::new(self.nu, self.rho, sigma)
    }
}

/// Uniform integration grid: multiples of `step` covering `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Domain(format!(
                "grid needs lo < hi; got [{lo}, {hi}]"
            )));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::Domain(format!("grid step must be positive; got {step}")));
        }
        let spec = Self { lo, hi, step };
        let points = spec.point_count();
        if points > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge {
                points,
                max: MAX_GRID_POINTS,
            });
        }
        Ok(spec)
    }

    /// Default grid for the given hyper-parameters: step `sigma/10`,
    /// range `nu +- 25 rho`.
    pub fn from_hyperparameters(hp: &Hyperparameters) -> Result<Self> {
        Self::new(hp.nu - 25.0 * hp.rho, hp.nu + 25.0 * hp.rho, hp.sigma / 10.0)
    }

    pub fn point_count(&self) -> usize {
        ((self.hi - self.lo) / self.step).ceil() as usize + 1
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let lo = self.lo;
        let step = self.step;
        (0..self.point_count()).map(move |i| lo + i as f64 * step)
    }
}

/// Per-interval single-segment evidence and posterior level moments.
///
/// `log_a0(i, j)` is the log evidence of `y[i+1..=j]` as one segment;
/// `mean(i, j)` and `second_moment(i, j)` are the linear-space ratios
/// `A1/A0` and `A2/A0`. Entries exist for `i < j` only; an interval whose
/// evidence underflowed to zero mass carries NaN moments and must be
/// skipped by weight (its posterior weight is exactly zero).
#[derive(Debug, Clone)]
pub struct MomentTables {
    n: usize,
    log_a0: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
}

impl MomentTables {
    fn zeroed(n: usize) -> Self {
        let cells = (n + 1) * (n + 1);
        Self {
            n,
            log_a0: vec![f64::NEG_INFINITY; cells],
            m1: vec![f64::NAN; cells],
            m2: vec![f64::NAN; cells],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn log_a0(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j && j <= self.n);
        self.log_a0[i * (self.n + 1) + j]
    }

    #[inline(always)]
    pub fn mean(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j && j <= self.n);
        self.m1[i * (self.n + 1) + j]
    }

    #[inline(always)]
    pub fn second_moment(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j && j <= self.n);
        self.m2[i * (self.n + 1) + j]
    }

    /// Posterior level variance of the interval, clamped at zero.
    pub fn variance(&self, i: usize, j: usize) -> f64 {
        let m1 = self.mean(i, j);
        (self.second_moment(i, j) - m1 * m1).max(0.0)
    }

    /// Row `i` of the log evidence table (all right endpoints).
    pub(crate) fn log_a0_row(&self, i: usize) -> &[f64] {
        let base = i * (self.n + 1);
        &self.log_a0[base..base + self.n + 1]
    }

    /// Transposed copy of the log evidence table, so that scans over the
    /// left endpoint at fixed right endpoint are contiguous.
    pub(crate) fn log_a0_transposed(&self) -> Vec<f64> {
        let w = self.n + 1;
        let mut t = vec![f64::NEG_INFINITY; w * w];
        for i in 0..w {
            for j in 0..w {
                t[j * w + i] = self.log_a0[i * w + j];
            }
        }
        t
    }
}

/// Closed-form Gaussian-noise/Gaussian-prior tables in O(n^2).
///
/// With `d = j - i`, `m = sum (y_t - nu)` and `s = sum (y_t - nu)^2`
/// accumulated incrementally over `j`:
///
/// ```text
/// log A0 = [m^2/(d + s2/r2) - s] / (2 s2)  -  d/2 log(2 pi s2)  -  log(1 + d r2/s2) / 2
/// A1/A0  = nu + m / (d + s2/r2)
/// A2/A0  = (A1/A0)^2 + 1 / (d/s2 + 1/r2)
/// ```
pub fn gaussian_moments(y: &DataSeries, hp: &Hyperparameters) -> MomentTables {
    let n = y.len();
    let values = y.values();
    let sigma2 = hp.sigma * hp.sigma;
    let rho2 = hp.rho * hp.rho;
    let ratio = sigma2 / rho2;
    let ln_noise_norm = 0.5 * (LN_2PI + sigma2.ln());

    let mut mt = MomentTables::zeroed(n);
    let w = n + 1;
    for i in 0..n {
        let mut m = 0.0;
        let mut s = 0.0;
        for j in (i + 1)..=n {
            let d = (j - i) as f64;
            let dev = values[j - 1] - hp.nu;
            m += dev;
            s += dev * dev;
            let log_a0 = (m * m / (d + ratio) - s) / (2.0 * sigma2)
                - d * ln_noise_norm
                - 0.5 * (1.0 + d * rho2 / sigma2).ln();
            let m1 = hp.nu + m / (d + ratio);
            let var = 1.0 / (d / sigma2 + 1.0 / rho2);
            let cell = i * w + j;
            mt.log_a0[cell] = log_a0;
            mt.m1[cell] = m1;
            mt.m2[cell] = m1 * m1 + var;
        }
    }
    mt
}

/// Grid-quadrature tables for arbitrary noise/prior densities in
/// O(n^2 G) with G grid points.
///
/// Per left endpoint `i` the grid carries log-space weights, initialized
/// to the prior density and multiplied by one noise density per added
/// point; the three moments are then extracted by a max-shifted
/// reduction. Plain rectangle rule on a fixed grid: when an interval
/// genuinely spans one segment the integrand is unimodal at the grid
/// scale, and when it does not, its evidence is negligible.
pub fn grid_moments<N: Density, P: Density>(
    y: &DataSeries,
    hp: &Hyperparameters,
    noise: &N,
    prior: &P,
    grid: &GridSpec,
) -> MomentTables {
    let n = y.len();
    let values = y.values();
    let points: Vec<f64> = grid.points().collect();
    let g = points.len();
    let ln_step = grid.step.ln();

    // Noise log-densities are reused across every left endpoint.
    let mut noise_table = vec![0.0f64; n * g];
    for (t, &yt) in values.iter().enumerate() {
        let row = &mut noise_table[t * g..(t + 1) * g];
        for (slot, &mu) in row.iter_mut().zip(&points) {
            *slot = noise.log_density(yt, mu, hp.sigma);
        }
    }

    let prior_row: Vec<f64> = points
        .iter()
        .map(|&mu| prior.log_density(mu, hp.nu, hp.rho))
        .collect();

    let mut mt = MomentTables::zeroed(n);
    let w = n + 1;
    let mut log_weights = vec![0.0f64; g];
    for i in 0..n {
        log_weights.copy_from_slice(&prior_row);
        for j in (i + 1)..=n {
            let row = &noise_table[(j - 1) * g..j * g];
            let mut max = f64::NEG_INFINITY;
            for (lw, &ld) in log_weights.iter_mut().zip(row) {
                *lw += ld;
                if *lw > max {
                    max = *lw;
                }
            }
            let cell = i * w + j;
            if max == f64::NEG_INFINITY {
                // Zero mass everywhere: the interval keeps -inf evidence
                // and NaN moments, and is unreachable by weight.
                continue;
            }
            let mut w0 = 0.0;
            let mut w1 = 0.0;
            let mut w2 = 0.0;
            for (&lw, &mu) in log_weights.iter().zip(&points) {
                let wgt = (lw - max).exp();
                w0 += wgt;
                w1 += wgt * mu;
                w2 += wgt * mu * mu;
            }
            mt.log_a0[cell] = max + w0.ln() + ln_step;
            mt.m1[cell] = w1 / w0;
            mt.m2[cell] = w2 / w0;
        }
    }
    mt
}

/// Dispatch to the closed form when both model halves are Gaussian,
/// otherwise to the grid.
pub fn moment_tables(
    y: &DataSeries,
    hp: &Hyperparameters,
    noise: NoiseModel,
    prior: NoiseModel,
) -> Result<MomentTables> {
    if noise == NoiseModel::Gauss && prior == NoiseModel::Gauss {
        Ok(gaussian_moments(y, hp))
    } else {
        let grid = GridSpec::from_hyperparameters(hp)?;
        Ok(grid_moments(y, hp, &noise, &prior, &grid))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(values: &[f64]) -> DataSeries {
        DataSeries::new(values.to_vec()).unwrap()
    }

    fn random_series(n: usize, seed: u64) -> DataSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DataSeries::new(
            (0..n)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite_input() {
        assert!(DataSeries::new(vec![]).is_err());
        assert!(DataSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(DataSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn single_point_gaussian_closed_form() {
        // One observation at the prior mean with sigma = rho = 1: the
        // marginal is N(0, 2), so log A0 = log(1/sqrt(4 pi)).
        let hp = Hyperparameters::new(0.0, 1.0, 1.0).unwrap();
        let mt = gaussian_moments(&series(&[0.0]), &hp);
        let expect = (1.0 / (4.0 * std::f64::consts::PI).sqrt()).ln();
        assert!((mt.log_a0(0, 1) - expect).abs() < 1e-12);
        assert!((expect + 1.2655121).abs() < 1e-6);
        assert!(mt.mean(0, 1).abs() < 1e-15);
        assert!((mt.variance(0, 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn incremental_accumulation_matches_recomputation() {
        let y = random_series(200, 7);
        let hp = Hyperparameters::new(0.3, 1.4, 0.6).unwrap();
        let mt = gaussian_moments(&y, &hp);
        let sigma2 = hp.sigma * hp.sigma;
        let rho2 = hp.rho * hp.rho;
        for i in 0..y.len() {
            for j in (i + 1)..=y.len() {
                let d = (j - i) as f64;
                let m: f64 = y.values()[i..j].iter().map(|v| v - hp.nu).sum();
                let s: f64 = y.values()[i..j].iter().map(|v| (v - hp.nu).powi(2)).sum();
                let expect = (m * m / (d + sigma2 / rho2) - s) / (2.0 * sigma2)
                    - (d / 2.0) * (LN_2PI + sigma2.ln())
                    - 0.5 * (1.0 + d * rho2 / sigma2).ln();
                let got = mt.log_a0(i, j);
                assert!(
                    (got - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                    "({i},{j}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn gaussian_mean_is_a_convex_combination() {
        let y = random_series(40, 11);
        let hp = Hyperparameters::new(0.0, 2.0, 0.5).unwrap();
        let mt = gaussian_moments(&y, &hp);
        for i in 0..y.len() {
            for j in (i + 1)..=y.len() {
                let lo = y.values()[i..j]
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
                    .min(hp.nu);
                let hi = y.values()[i..j]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
                    .max(hp.nu);
                let m1 = mt.mean(i, j);
                assert!(m1 >= lo - 1e-12 && m1 <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_variance_never_negative_before_clamp() {
        let y = random_series(50, 13);
        let hp = Hyperparameters::new(-0.2, 0.9, 0.3).unwrap();
        let mt = gaussian_moments(&y, &hp);
        for i in 0..y.len() {
            for j in (i + 1)..=y.len() {
                let raw = mt.second_moment(i, j) - mt.mean(i, j).powi(2);
                assert!(raw >= -1e-12, "raw variance {raw} at ({i},{j})");
            }
        }
    }

    #[test]
    fn grid_agrees_with_gaussian_closed_form() {
        let y = random_series(20, 17);
        let hp = Hyperparameters::new(0.1, 1.2, 0.8).unwrap();
        let exact = gaussian_moments(&y, &hp);
        let grid = GridSpec::from_hyperparameters(&hp).unwrap();
        let approx = grid_moments(&y, &hp, &NoiseModel::Gauss, &NoiseModel::Gauss, &grid);
        for i in 0..y.len() {
            for j in (i + 1)..=y.len() {
                assert!(
                    (exact.log_a0(i, j) - approx.log_a0(i, j)).abs() <= 1e-3,
                    "log A0 at ({i},{j})"
                );
                let rel =
                    |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
                assert!(rel(exact.mean(i, j), approx.mean(i, j)) <= 1e-3);
                assert!(rel(exact.second_moment(i, j), approx.second_moment(i, j)) <= 1e-3);
            }
        }
    }

    #[test]
    fn cauchy_single_point_is_symmetric_with_finite_moments() {
        let hp = Hyperparameters::new(0.0, 1.0, 1.0).unwrap();
        let grid = GridSpec::from_hyperparameters(&hp).unwrap();
        let mt = grid_moments(
            &series(&[0.0]),
            &hp,
            &NoiseModel::Cauchy,
            &NoiseModel::Cauchy,
            &grid,
        );
        // Prior x noise is a product of two Cauchys, so first and second
        // moments exist even though neither factor has any.
        assert!(mt.mean(0, 1).abs() <= 1e-9);
        assert!(mt.second_moment(0, 1).is_finite());
        assert!(mt.log_a0(0, 1).is_finite());
    }

    #[test]
    fn two_point_interval_matches_direct_quadrature() {
        let y = series(&[0.4, -0.3, 0.9]);
        let hp = Hyperparameters::new(0.0, 1.0, 0.5).unwrap();
        let grid = GridSpec::from_hyperparameters(&hp).unwrap();
        let mt = grid_moments(&y, &hp, &NoiseModel::Cauchy, &NoiseModel::Gauss, &grid);
        // Direct rectangle sum of P(mu) P(y2|mu) P(y3|mu) d mu.
        let direct: f64 = grid
            .points()
            .map(|mu| {
                (NoiseModel::Gauss.log_density(mu, hp.nu, hp.rho)
                    + NoiseModel::Cauchy.log_density(-0.3, mu, hp.sigma)
                    + NoiseModel::Cauchy.log_density(0.9, mu, hp.sigma))
                .exp()
            })
            .sum::<f64>()
            * grid.step;
        assert!((mt.log_a0(1, 3) - direct.ln()).abs() < 1e-9);
    }

    #[test]
    fn unreachable_interval_keeps_zero_mass_and_flagged_moments() {
        // A point so extreme the squared z-score overflows: every grid
        // weight is zero mass, the interval keeps -inf evidence and its
        // moments are undefined.
        let y = series(&[0.0, 1e300]);
        let hp = Hyperparameters::new(0.0, 1.0, 0.1).unwrap();
        let grid = GridSpec::from_hyperparameters(&hp).unwrap();
        let mt = grid_moments(&y, &hp, &NoiseModel::Gauss, &NoiseModel::Gauss, &grid);
        assert_eq!(mt.log_a0(1, 2), f64::NEG_INFINITY);
        assert!(mt.mean(1, 2).is_nan());
        assert!(mt.log_a0(0, 1).is_finite());
    }

    #[test]
    fn grid_spec_point_count_and_bounds() {
        let spec = GridSpec::new(-25.0, 25.0, 0.1).unwrap();
        assert_eq!(spec.point_count(), 501);
        let pts: Vec<f64> = spec.points().collect();
        assert_eq!(pts.len(), 501);
        assert!(pts[0] == -25.0 && *pts.last().unwrap() >= 25.0 - 1e-9);
        assert!(GridSpec::new(1.0, 1.0, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(matches!(
            GridSpec::new(0.0, 1e9, 1e-6),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn scale_floor_tracks_data_range() {
        assert_eq!(series(&[5.0, 5.0, 5.0]).scale_floor(), 1e-12);
        assert!((series(&[0.0, 10.0]).scale_floor() - 1e-11).abs() < 1e-25);
    }
}
