//! The core dynamic program: left/right recursions over interval
//! evidences, data evidence, segment-count posterior, boundary
//! posteriors, segment levels, the Bayesian regression curve, and
//! log-likelihood diagnostics.
//!
//! `L[k][j]` is the log of the (binomial-rescaled) evidence of the prefix
//! `y[1..=j]` split into exactly `k` segments, summed over all boundary
//! placements; `R[k][i]` is the same for the suffix `y[i+1..=n]`. Both
//! tables cost `O(k_max n^2)` time and `O(k_max n)` space, and everything
//! else is read off them.

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, log_sum_exp_slice, Density, NoiseModel, LN_2PI};
use crate::segment_evidence::{DataSeries, MomentTables};

/// Log-space left/right recursion tables, `(k_max+1) x (n+1)` each.
#[derive(Debug, Clone)]
pub struct DpTables {
    n: usize,
    k_max: usize,
    l: Vec<f64>,
    r: Vec<f64>,
}

impl DpTables {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// log Q0(y[1..=j] | k): prefix evidence with exactly k segments.
    #[inline(always)]
    pub fn l(&self, k: usize, j: usize) -> f64 {
        debug_assert!(k <= self.k_max && j <= self.n);
        self.l[k * (self.n + 1) + j]
    }

    /// log Q0(y[i+1..=n] | k): suffix evidence with exactly k segments.
    #[inline(always)]
    pub fn r(&self, k: usize, i: usize) -> f64 {
        debug_assert!(k <= self.k_max && i <= self.n);
        self.r[k * (self.n + 1) + i]
    }
}

/// Build the left and right recursions from the interval evidences.
///
/// `L[k+1][j] = logsumexp over h in [k, j-1] of L[k][h] + log A0[h][j]`,
/// and mirrored for `R`. Row `k` of either table is `-inf` wherever fewer
/// points than segments remain.
pub fn build_dp(mt: &MomentTables, k_max: usize) -> Result<DpTables> {
    let n = mt.n();
    if k_max < 1 || k_max > n {
        return Err(Error::Domain(format!(
            "k_max must be in [1, n]; got k_max={k_max}, n={n}"
        )));
    }
    let w = n + 1;
    let mut l = vec![f64::NEG_INFINITY; (k_max + 1) * w];
    let mut r = vec![f64::NEG_INFINITY; (k_max + 1) * w];
    l[0] = 0.0; // L[0][0]: the empty prefix has zero segments
    r[n] = 0.0; // R[0][n]: the empty suffix likewise

    // Column-contiguous copy of log A0 for the prefix recursion.
    let a0t = mt.log_a0_transposed();
    let mut terms = vec![f64::NEG_INFINITY; w];

    for k in 0..k_max {
        let (head, tail) = l.split_at_mut((k + 1) * w);
        let l_prev = &head[k * w..(k + 1) * w];
        let l_next = &mut tail[..w];
        for j in (k + 1)..=n {
            let col = &a0t[j * w..(j + 1) * w];
            let mut max = f64::NEG_INFINITY;
            for h in k..j {
                let v = l_prev[h] + col[h];
                terms[h] = v;
                if v > max {
                    max = v;
                }
            }
            if max > f64::NEG_INFINITY {
                let mut sum = 0.0;
                for &t in &terms[k..j] {
                    sum += (t - max).exp();
                }
                l_next[j] = max + sum.ln();
            }
        }

        let (head, tail) = r.split_at_mut((k + 1) * w);
        let r_prev = &head[k * w..(k + 1) * w];
        let r_next = &mut tail[..w];
        for i in 0..=(n - k - 1) {
            let row = mt.log_a0_row(i);
            let hi = n - k;
            let mut max = f64::NEG_INFINITY;
            for h in (i + 1)..=hi {
                let v = row[h] + r_prev[h];
                terms[h] = v;
                if v > max {
                    max = v;
                }
            }
            if max > f64::NEG_INFINITY {
                let mut sum = 0.0;
                for &t in &terms[(i + 1)..=hi] {
                    sum += (t - max).exp();
                }
                r_next[i] = max + sum.ln();
            }
        }
    }

    Ok(DpTables { n, k_max, l, r })
}

/// Data evidence, posterior over the segment count, and its MAP.
///
/// `log E = logsumexp_k (L[k][n] - log C(n-1, k-1)) - log k_max` under
/// the uniform prior on `k`; ties in the posterior break toward the
/// smallest count.
pub fn evidence_and_ck(dp: &DpTables) -> Result<(f64, Vec<f64>, usize)> {
    let n = dp.n();
    let k_max = dp.k_max();
    let mut terms = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        terms.push(dp.l(k, n) - log_binomial((n - 1) as u64, (k - 1) as u64)?);
    }
    let total = log_sum_exp_slice(&terms);
    if total == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    }
    let log_evidence = total - (k_max as f64).ln();
    let ck: Vec<f64> = terms.iter().map(|&t| (t - total).exp()).collect();
    let mut best = 0;
    for (i, &c) in ck.iter().enumerate() {
        if c > ck[best] {
            best = i;
        }
    }
    Ok((log_evidence, ck, best + 1))
}

/// Posterior location of each boundary given the MAP segment count.
///
/// Returns the `(k_hat+1) x (n+1)` table `B[p][h] = P(t_p = h | y, k_hat)`,
/// the aggregate inner-break probability per position, and the per-boundary
/// MAP locations (leftmost on ties). The endpoints `t_0 = 0` and
/// `t_k = n` are deterministic and excluded from the aggregate.
#[allow(clippy::type_complexity)]
pub fn boundary_posterior(
    dp: &DpTables,
    k_hat: usize,
) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<usize>)> {
    let n = dp.n();
    if k_hat < 1 || k_hat > dp.k_max() {
        return Err(Error::Domain(format!(
            "k_hat must be in [1, k_max]; got {k_hat}"
        )));
    }
    let log_full = dp.l(k_hat, n);
    if log_full == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    }
    let mut table = vec![vec![0.0f64; n + 1]; k_hat + 1];
    let mut t_hat = vec![0usize; k_hat + 1];
    for (p, row) in table.iter_mut().enumerate() {
        let mut best_h = 0usize;
        let mut best_lw = f64::NEG_INFINITY;
        for (h, slot) in row.iter_mut().enumerate() {
            let lw = dp.l(p, h) + dp.r(k_hat - p, h) - log_full;
            *slot = lw.exp();
            if lw > best_lw {
                best_lw = lw;
                best_h = h;
            }
        }
        t_hat[p] = best_h;
    }
    let mut b_total = vec![0.0f64; n + 1];
    for row in table.iter().take(k_hat).skip(1) {
        for (acc, &b) in b_total.iter_mut().zip(row) {
            *acc += b;
        }
    }
    Ok((table, b_total, t_hat))
}

/// Posterior mean and standard deviation of one segment's level.
///
/// A segment of zero (or negative) length carries no data and no moments;
/// it is preserved and flagged rather than silently merged, since MAP
/// boundary marginals can legitimately coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentEstimate {
    pub start: usize,
    pub end: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl SegmentEstimate {
    pub fn is_empty(&self) -> bool {
        self.mean.is_none()
    }
}

/// Level moments for the segments delimited by `t_hat`.
pub fn segment_levels(mt: &MomentTables, t_hat: &[usize]) -> Vec<SegmentEstimate> {
    debug_assert!(t_hat.first() == Some(&0) && t_hat.last() == Some(&mt.n()));
    t_hat
        .windows(2)
        .map(|w| {
            let (i, j) = (w[0], w[1]);
            if j > i {
                SegmentEstimate {
                    start: i,
                    end: j,
                    mean: Some(mt.mean(i, j)),
                    std: Some(mt.variance(i, j).sqrt()),
                }
            } else {
                SegmentEstimate {
                    start: i,
                    end: j,
                    mean: None,
                    std: None,
                }
            }
        })
        .collect()
}

/// Bayesian regression curve: posterior mean level at every position,
/// its standard deviation, the raw posterior second moment, and the
/// total segment mass covering each position (1 up to rounding;
/// exposed for validation).
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionCurve {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub second: Vec<f64>,
    pub mass: Vec<f64>,
}

/// Raw curve moment sums for a fixed segment count.
#[allow(clippy::needless_range_loop)]
fn curve_moments_for_k(mt: &MomentTables, dp: &DpTables, k: usize) -> Result<[Vec<f64>; 3]> {
    let n = dp.n();
    let log_full = dp.l(k, n);
    if log_full == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    }

    // For the incremental update we only need, per position t, the sums
    // of F over the column (i < t, j = t) and over the row (i = t, j > t);
    // F itself is never materialized.
    let mut col_sums = [vec![0.0f64; n + 1], vec![0.0f64; n + 1], vec![0.0f64; n + 1]];
    let mut row_sums = [vec![0.0f64; n + 1], vec![0.0f64; n + 1], vec![0.0f64; n + 1]];
    let mut terms = vec![0.0f64; k];
    for i in 0..n {
        let a0_row = mt.log_a0_row(i);
        for j in (i + 1)..=n {
            let log_a0 = a0_row[j];
            if log_a0 == f64::NEG_INFINITY {
                continue;
            }
            let mut max = f64::NEG_INFINITY;
            for m in 1..=k {
                let v = dp.l(m - 1, i) + dp.r(k - m, j);
                terms[m - 1] = v;
                if v > max {
                    max = v;
                }
            }
            if max == f64::NEG_INFINITY {
                continue;
            }
            let mut sum = 0.0;
            for &t in &terms {
                sum += (t - max).exp();
            }
            let f0 = (max + sum.ln() + log_a0 - log_full).exp();
            if f0 == 0.0 {
                continue;
            }
            let f1 = f0 * mt.mean(i, j);
            let f2 = f0 * mt.second_moment(i, j);
            row_sums[0][i] += f0;
            row_sums[1][i] += f1;
            row_sums[2][i] += f2;
            col_sums[0][j] += f0;
            col_sums[1][j] += f1;
            col_sums[2][j] += f2;
        }
    }

    let mut out = [vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; n]];
    for r in 0..3 {
        let mut acc = 0.0;
        for t in 0..n {
            acc = acc - col_sums[r][t] + row_sums[r][t];
            out[r][t] = acc;
        }
    }
    Ok(out)
}

/// Regression curve conditioned on the MAP segment count `k_hat`.
pub fn regression_curve(mt: &MomentTables, dp: &DpTables, k_hat: usize) -> Result<RegressionCurve> {
    let [mass, mean, second] = curve_moments_for_k(mt, dp, k_hat)?;
    Ok(finish_curve(mass, mean, second))
}

/// Regression curve averaged over the segment count, weighted by the
/// posterior `C_k`. Counts with negligible mass are skipped.
pub fn regression_curve_mixture(
    mt: &MomentTables,
    dp: &DpTables,
    ck: &[f64],
) -> Result<RegressionCurve> {
    let n = dp.n();
    let mut mass = vec![0.0f64; n];
    let mut mean = vec![0.0f64; n];
    let mut second = vec![0.0f64; n];
    for (idx, &c) in ck.iter().enumerate() {
        if c < 1e-12 {
            continue;
        }
        let [m0, m1, m2] = curve_moments_for_k(mt, dp, idx + 1)?;
        for t in 0..n {
            mass[t] += c * m0[t];
            mean[t] += c * m1[t];
            second[t] += c * m2[t];
        }
    }
    Ok(finish_curve(mass, mean, second))
}

fn finish_curve(mass: Vec<f64>, mean: Vec<f64>, second: Vec<f64>) -> RegressionCurve {
    let std = mean
        .iter()
        .zip(&second)
        .map(|(&m, &s)| (s - m * m).max(0.0).sqrt())
        .collect();
    RegressionCurve {
        mean,
        std,
        second,
        mass,
    }
}

/// The piecewise-constant MAP fit implied by boundaries and levels.
/// Empty segments contribute nothing; every position is still covered
/// because the boundary vector starts at 0 and ends at n.
pub fn piecewise_fit(segments: &[SegmentEstimate], n: usize) -> Vec<f64> {
    let mut fit = vec![f64::NAN; n];
    for seg in segments {
        if let Some(mean) = seg.mean {
            for slot in fit.iter_mut().take(seg.end).skip(seg.start) {
                *slot = mean;
            }
        }
    }
    debug_assert!(fit.iter().all(|v| v.is_finite()));
    fit
}

/// Log-likelihood of the data under a fitted curve, against its expected
/// value and spread when the data really come from that fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikDiagnostics {
    pub ll: f64,
    pub ll_mean: f64,
    pub ll_std: f64,
    /// `(ll - ll_mean) / ll_std`: misspecification in standard deviations.
    pub ll_rel: f64,
}

/// Fit log-likelihood diagnostics. The reference mean is the negative
/// noise entropy times n; the variance is n/2 for Gaussian noise and
/// n pi^2 / 3 for Cauchy.
pub fn loglik_diagnostics(
    y: &DataSeries,
    fit: &[f64],
    sigma: f64,
    kind: NoiseModel,
) -> LogLikDiagnostics {
    let n = y.len() as f64;
    let ll: f64 = y
        .values()
        .iter()
        .zip(fit)
        .map(|(&yi, &fi)| kind.log_density(yi, fi, sigma))
        .sum();
    let (ll_mean, ll_var) = match kind {
        NoiseModel::Gauss => (-0.5 * n * (LN_2PI + 1.0 + (sigma * sigma).ln()), 0.5 * n),
        NoiseModel::Cauchy => {
            let pi = std::f64::consts::PI;
            (-n * (4.0 * pi * sigma).ln(), n * pi * pi / 3.0)
        }
    };
    let ll_std = ll_var.sqrt();
    LogLikDiagnostics {
        ll,
        ll_mean,
        ll_std,
        ll_rel: (ll - ll_mean) / ll_std,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_sum_exp;
    use crate::segment_evidence::{gaussian_moments, Hyperparameters};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_series(n: usize, seed: u64) -> DataSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DataSeries::new(
            (0..n)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect(),
        )
        .unwrap()
    }

    fn tables(y: &DataSeries) -> MomentTables {
        let hp = Hyperparameters::new(0.1, 1.3, 0.7).unwrap();
        gaussian_moments(y, &hp)
    }

    #[test]
    fn first_row_is_the_single_segment_evidence() {
        let y = random_series(12, 3);
        let mt = tables(&y);
        let dp = build_dp(&mt, y.len()).unwrap();
        for j in 1..=y.len() {
            assert_eq!(dp.l(1, j), mt.log_a0(0, j));
        }
        for i in 0..y.len() {
            assert_eq!(dp.r(1, i), mt.log_a0(i, y.len()));
        }
    }

    #[test]
    fn two_segment_prefix_sums_over_the_inner_boundary() {
        let y = random_series(3, 5);
        let mt = tables(&y);
        let dp = build_dp(&mt, 3).unwrap();
        let expect = log_sum_exp(
            mt.log_a0(0, 1) + mt.log_a0(1, 3),
            mt.log_a0(0, 2) + mt.log_a0(2, 3),
        );
        assert!((dp.l(2, 3) - expect).abs() < 1e-12);
    }

    #[test]
    fn left_and_right_recursions_agree_on_the_full_series() {
        let y = random_series(25, 8);
        let mt = tables(&y);
        let dp = build_dp(&mt, y.len()).unwrap();
        for k in 1..=y.len() {
            let (l, r) = (dp.l(k, y.len()), dp.r(k, 0));
            if l == f64::NEG_INFINITY {
                assert_eq!(r, f64::NEG_INFINITY);
            } else {
                assert!((l - r).abs() < 1e-9, "k={k}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn reversing_the_data_swaps_the_recursions() {
        let y = random_series(18, 21);
        let n = y.len();
        let hp = Hyperparameters::new(0.0, 1.0, 0.5).unwrap();
        let dp = build_dp(&gaussian_moments(&y, &hp), n).unwrap();
        let dp_rev = build_dp(&gaussian_moments(&y.reversed(), &hp), n).unwrap();
        for k in 0..=n {
            for j in 0..=n {
                let a = dp_rev.l(k, j);
                let b = dp.r(k, n - j);
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    assert_eq!(a, b);
                } else {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn too_few_points_for_the_segment_count_is_zero_mass() {
        let y = random_series(9, 30);
        let mt = tables(&y);
        let dp = build_dp(&mt, y.len()).unwrap();
        for k in 1..=y.len() {
            for j in 0..=y.len() {
                assert_eq!(
                    dp.l(k, j) == f64::NEG_INFINITY,
                    j < k,
                    "L[{k}][{j}] finiteness"
                );
            }
        }
        // Row zero is the delta at the empty prefix.
        assert_eq!(dp.l(0, 0), 0.0);
        assert!((1..=y.len()).all(|j| dp.l(0, j) == f64::NEG_INFINITY));
    }

    #[test]
    fn single_point_series_has_one_certain_segmentation() {
        let y = DataSeries::new(vec![0.4]).unwrap();
        let mt = tables(&y);
        let dp = build_dp(&mt, 1).unwrap();
        let (log_e, ck, k_hat) = evidence_and_ck(&dp).unwrap();
        assert_eq!(ck, vec![1.0]);
        assert_eq!(k_hat, 1);
        assert!((log_e - mt.log_a0(0, 1)).abs() < 1e-12);
    }

    #[test]
    fn count_posterior_is_normalized() {
        let y = random_series(30, 2);
        let dp = build_dp(&tables(&y), 30).unwrap();
        let (_, ck, k_hat) = evidence_and_ck(&dp).unwrap();
        let total: f64 = ck.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((1..=30).contains(&k_hat));
    }

    #[test]
    fn boundary_rows_are_normalized_with_fixed_endpoints() {
        let y = random_series(22, 14);
        let dp = build_dp(&tables(&y), 22).unwrap();
        let (_, _, k_hat) = evidence_and_ck(&dp).unwrap();
        let (table, b_total, t_hat) = boundary_posterior(&dp, k_hat).unwrap();
        // Endpoint rows put all mass on the fixed boundaries; the first
        // row carries the L/R rounding mismatch, the last is exact.
        assert!((table[0][0] - 1.0).abs() < 1e-9);
        assert_eq!(table[k_hat][22], 1.0);
        assert_eq!(t_hat[0], 0);
        assert_eq!(t_hat[k_hat], 22);
        for row in &table {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6, "row sum {sum}");
        }
        // Inner aggregate only: total mass is k_hat - 1.
        let agg: f64 = b_total.iter().sum();
        assert!((agg - (k_hat as f64 - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn single_segment_levels_approach_the_sample_mean() {
        // Broad prior: posterior mean ~ sample mean, std ~ sigma/sqrt(n).
        let y = random_series(50, 9);
        let hp = Hyperparameters::new(0.0, 1e6, 0.7).unwrap();
        let mt = gaussian_moments(&y, &hp);
        let segs = segment_levels(&mt, &[0, y.len()]);
        assert_eq!(segs.len(), 1);
        let sample_mean = y.values().iter().sum::<f64>() / 50.0;
        assert!((segs[0].mean.unwrap() - sample_mean).abs() < 1e-6);
        assert!((segs[0].std.unwrap() - 0.7 / 50.0_f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn single_point_segments_read_the_moment_table() {
        let y = DataSeries::new(vec![0.0, 10.0]).unwrap();
        let mt = tables(&y);
        let segs = segment_levels(&mt, &[0, 1, 2]);
        assert_eq!(segs[0].mean.unwrap(), mt.mean(0, 1));
        assert_eq!(segs[1].mean.unwrap(), mt.mean(1, 2));
    }

    #[test]
    fn coincident_boundaries_yield_a_flagged_empty_segment() {
        let y = random_series(6, 40);
        let mt = tables(&y);
        let segs = segment_levels(&mt, &[0, 3, 3, 6]);
        assert!(!segs[0].is_empty());
        assert!(segs[1].is_empty());
        assert_eq!(segs[1].start, segs[1].end);
        assert!(!segs[2].is_empty());
    }

    #[test]
    fn one_segment_curve_is_constant() {
        let y = random_series(15, 6);
        let mt = tables(&y);
        let dp = build_dp(&mt, 15).unwrap();
        let curve = regression_curve(&mt, &dp, 1).unwrap();
        for t in 0..15 {
            assert!((curve.mean[t] - mt.mean(0, 15)).abs() < 1e-12);
            assert!((curve.mass[t] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_mass_is_one_everywhere() {
        let y = random_series(40, 77);
        let mt = tables(&y);
        let dp = build_dp(&mt, 40).unwrap();
        let (_, ck, k_hat) = evidence_and_ck(&dp).unwrap();
        for curve in [
            regression_curve(&mt, &dp, k_hat).unwrap(),
            regression_curve_mixture(&mt, &dp, &ck).unwrap(),
        ] {
            for (t, &m) in curve.mass.iter().enumerate() {
                assert!((m - 1.0).abs() < 1e-6, "mass at t={}: {m}", t + 1);
            }
            assert!(curve.std.iter().all(|&s| s >= 0.0));
        }
    }

    #[test]
    fn incremental_curve_matches_the_direct_double_sum() {
        let y = random_series(35, 55);
        let mt = tables(&y);
        let n = y.len();
        let dp = build_dp(&mt, n).unwrap();
        let (_, _, k_hat) = evidence_and_ck(&dp).unwrap();
        let curve = regression_curve(&mt, &dp, k_hat).unwrap();
        let log_full = dp.l(k_hat, n);
        for t in 1..=n {
            let mut direct = [0.0f64; 3];
            for i in 0..t {
                for j in t..=n {
                    let mut lws = Vec::new();
                    for m in 1..=k_hat {
                        lws.push(dp.l(m - 1, i) + dp.r(k_hat - m, j));
                    }
                    let f0 = (log_sum_exp_slice(&lws) + mt.log_a0(i, j) - log_full).exp();
                    direct[0] += f0;
                    direct[1] += f0 * mt.mean(i, j);
                    direct[2] += f0 * mt.second_moment(i, j);
                }
            }
            assert!((curve.mass[t - 1] - direct[0]).abs() <= 1e-10 * direct[0].abs());
            assert!((curve.mean[t - 1] - direct[1]).abs() <= 1e-10 * direct[1].abs().max(1e-12));
        }
    }

    #[test]
    fn shifting_the_data_shifts_levels_but_not_structure() {
        let y = random_series(24, 61);
        let shift = 5.0;
        let y2 = DataSeries::new(y.values().iter().map(|v| v + shift).collect()).unwrap();
        let hp = Hyperparameters::new(0.2, 1.1, 0.6).unwrap();
        let hp2 = Hyperparameters::new(0.2 + shift, 1.1, 0.6).unwrap();
        let dp = build_dp(&gaussian_moments(&y, &hp), 24).unwrap();
        let dp2 = build_dp(&gaussian_moments(&y2, &hp2), 24).unwrap();
        let (e1, ck1, k1) = evidence_and_ck(&dp).unwrap();
        let (e2, ck2, k2) = evidence_and_ck(&dp2).unwrap();
        assert!((e1 - e2).abs() < 1e-9);
        assert_eq!(k1, k2);
        for (a, b) in ck1.iter().zip(&ck2) {
            assert!((a - b).abs() < 1e-9);
        }
        let (_, _, t1) = boundary_posterior(&dp, k1).unwrap();
        let (_, _, t2) = boundary_posterior(&dp2, k2).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn perfect_gaussian_fit_has_rel_loglik_sqrt_half_n() {
        let n = 64;
        let y = DataSeries::new(vec![1.5; n]).unwrap();
        let fit = vec![1.5; n];
        let d = loglik_diagnostics(&y, &fit, 0.3, NoiseModel::Gauss);
        let expect_ll = -(n as f64 / 2.0) * (LN_2PI + (0.3f64 * 0.3).ln());
        assert!((d.ll - expect_ll).abs() < 1e-9);
        assert!((d.ll_rel - (n as f64 / 2.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cauchy_loglik_variance_is_n_pi_squared_over_three() {
        let n = 10;
        let y = random_series(n, 1);
        let fit = vec![0.0; n];
        let d = loglik_diagnostics(&y, &fit, 1.0, NoiseModel::Cauchy);
        let pi = std::f64::consts::PI;
        assert!((d.ll_std * d.ll_std - n as f64 * pi * pi / 3.0).abs() < 1e-9);
        assert!((d.ll_mean + n as f64 * (4.0 * pi).ln()).abs() < 1e-9);
    }

    #[test]
    fn build_dp_rejects_bad_k_max() {
        let y = random_series(5, 4);
        let mt = tables(&y);
        assert!(build_dp(&mt, 0).is_err());
        assert!(build_dp(&mt, 6).is_err());
    }
}
