//! Exhaustive-enumeration reference for small series.
//!
//! Walks every segmentation explicitly and accumulates all posterior
//! quantities in linear space under one global log offset. Deliberately
//! shares no code path with the recursions it validates.

use crate::dp_engine::{boundary_posterior, build_dp, evidence_and_ck, regression_curve};
use crate::error::{Error, Result};
use crate::numerics::log_binomial;
use crate::segment_evidence::MomentTables;

/// Enumeration is 2^(n-1) segmentations; past this it is pointless.
pub const MAX_ORACLE_N: usize = 14;

/// Everything the enumeration produces, mirroring the recursion outputs.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub log_evidence: f64,
    pub ck: Vec<f64>,
    pub k_hat: usize,
    /// `(k_hat+1) x (n+1)` boundary marginals given `k_hat`.
    pub boundary_posterior: Vec<Vec<f64>>,
    pub t_hat: Vec<usize>,
    /// Posterior mean level per position, given `k_hat`.
    pub curve_mean: Vec<f64>,
    /// Posterior second moment per position, given `k_hat`.
    pub curve_second: Vec<f64>,
}

/// One segmentation: `k` segments with boundary vector `0 = t_0 < ... < t_k = n`.
#[derive(Debug, Clone)]
struct Segmentation {
    boundaries: Vec<usize>,
    log_weight: f64,
}

fn enumerate_segmentations(mt: &MomentTables, k: usize) -> Vec<Segmentation> {
    let n = mt.n();
    let mut out = Vec::new();
    let mut boundaries = vec![0usize; k + 1];
    boundaries[k] = n;

    // Depth-first placement of inner boundaries t_1 < ... < t_{k-1}.
    fn descend(
        mt: &MomentTables,
        boundaries: &mut Vec<usize>,
        pos: usize,
        log_weight: f64,
        out: &mut Vec<Segmentation>,
    ) {
        let k = boundaries.len() - 1;
        let n = boundaries[k];
        if pos == k {
            let last = mt.log_a0(boundaries[k - 1], n);
            out.push(Segmentation {
                boundaries: boundaries.clone(),
                log_weight: log_weight + last,
            });
            return;
        }
        let lo = boundaries[pos - 1] + 1;
        let hi = n - (k - pos); // leave room for the remaining boundaries
        for t in lo..=hi {
            boundaries[pos] = t;
            let w = log_weight + mt.log_a0(boundaries[pos - 1], t);
            descend(mt, boundaries, pos + 1, w, out);
        }
    }

    if k == 1 {
        out.push(Segmentation {
            boundaries: boundaries.clone(),
            log_weight: mt.log_a0(0, n),
        });
    } else {
        descend(mt, &mut boundaries, 1, 0.0, &mut out);
    }
    out
}

/// Evidence, count posterior, boundary marginals and curve moments by
/// direct summation over every segmentation.
pub fn enumerate_posterior(mt: &MomentTables, k_max: usize) -> Result<OracleResult> {
    let n = mt.n();
    if n > MAX_ORACLE_N {
        return Err(Error::EnumerationTooLarge { n, max: MAX_ORACLE_N });
    }
    if k_max < 1 || k_max > n {
        return Err(Error::Domain(format!(
            "k_max must be in [1, n]; got k_max={k_max}, n={n}"
        )));
    }

    let ln_k_max = (k_max as f64).ln();
    let mut per_k: Vec<Vec<Segmentation>> = Vec::with_capacity(k_max);
    let mut offset = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let mut segs = enumerate_segmentations(mt, k);
        let prior = -log_binomial((n - 1) as u64, (k - 1) as u64)? - ln_k_max;
        for s in &mut segs {
            s.log_weight += prior;
            if s.log_weight > offset {
                offset = s.log_weight;
            }
        }
        per_k.push(segs);
    }
    if offset == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    }

    let mut grand_total = 0.0f64;
    let mut k_totals = vec![0.0f64; k_max];
    for (idx, segs) in per_k.iter().enumerate() {
        for s in segs {
            k_totals[idx] += (s.log_weight - offset).exp();
        }
        grand_total += k_totals[idx];
    }
    let log_evidence = offset + grand_total.ln();
    let ck: Vec<f64> = k_totals.iter().map(|&t| t / grand_total).collect();
    let mut k_hat = 1;
    for (idx, &c) in ck.iter().enumerate() {
        if c > ck[k_hat - 1] {
            k_hat = idx + 1;
        }
    }

    // Marginals and curve moments, conditioned on k_hat.
    let segs = &per_k[k_hat - 1];
    let total = k_totals[k_hat - 1];
    let mut boundary = vec![vec![0.0f64; n + 1]; k_hat + 1];
    let mut curve_mean = vec![0.0f64; n];
    let mut curve_second = vec![0.0f64; n];
    for s in segs {
        let w = (s.log_weight - offset).exp() / total;
        for (p, &t) in s.boundaries.iter().enumerate() {
            boundary[p][t] += w;
        }
        for m in 1..=k_hat {
            let (i, j) = (s.boundaries[m - 1], s.boundaries[m]);
            let mean = mt.mean(i, j);
            let second = mt.second_moment(i, j);
            for slot in i..j {
                curve_mean[slot] += w * mean;
                curve_second[slot] += w * second;
            }
        }
    }
    let t_hat = boundary
        .iter()
        .map(|row| {
            let mut best = 0usize;
            for (h, &b) in row.iter().enumerate() {
                if b > row[best] {
                    best = h;
                }
            }
            best
        })
        .collect();

    Ok(OracleResult {
        log_evidence,
        ck,
        k_hat,
        boundary_posterior: boundary,
        t_hat,
        curve_mean,
        curve_second,
    })
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Largest relative deviation between the recursion outputs and the
/// enumeration, across log-evidence, the count posterior, all boundary
/// posteriors and the regression curve mean.
///
/// Probabilities computed through logs keep small relative error even
/// when tiny, so they are compared plainly (with an underflow guard).
/// The curve mean crosses zero, where pure relative error is undefined;
/// deviations there are taken against the curve's own scale.
pub fn compare_with_dp(mt: &MomentTables, k_max: usize) -> Result<f64> {
    let dp = build_dp(mt, k_max)?;
    let (log_e, ck, k_hat) = evidence_and_ck(&dp)?;
    let reference = enumerate_posterior(mt, k_max)?;
    if k_hat != reference.k_hat {
        return Ok(f64::INFINITY);
    }

    let mut dev = rel_dev(log_e, reference.log_evidence);
    for (&a, &b) in ck.iter().zip(&reference.ck) {
        dev = dev.max(rel_dev(a, b));
    }

    let (boundary, _, _) = boundary_posterior(&dp, k_hat)?;
    for (row_dp, row_or) in boundary.iter().zip(&reference.boundary_posterior) {
        for (&a, &b) in row_dp.iter().zip(row_or) {
            if a.abs().max(b.abs()) < 1e-290 {
                continue;
            }
            dev = dev.max(rel_dev(a, b));
        }
    }

    let curve = regression_curve(mt, &dp, k_hat)?;
    let scale = curve
        .mean
        .iter()
        .chain(&reference.curve_mean)
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    for (&a, &b) in curve.mean.iter().zip(&reference.curve_mean) {
        dev = dev.max((a - b).abs() / a.abs().max(b.abs()).max(1e-3 * scale));
    }

    Ok(dev)
}

/// Number of segmentations of n points into k segments, exactly.
pub fn segmentation_count(n: usize, k: usize) -> u64 {
    if k < 1 || k > n {
        return 0;
    }
    // C(n-1, k-1) by Pascal row.
    let (n, k) = ((n - 1) as u64, (k - 1) as u64);
    let mut c = 1u64;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}
