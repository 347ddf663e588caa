//! Performance acceptance criterion, kept in its own test binary so the
//! timing is not disturbed by concurrently running tests.

use bpcr_core::*;
use std::time::Instant;

fn staircase(n: usize, seed: u64) -> DataSeries {
    let levels: Vec<f64> = (0..10).map(|i| (i % 5) as f64 * 0.8 - 1.6).collect();
    let boundaries: Vec<usize> = (0..=10).map(|i| i * n / 10).collect();
    GroundTruth::new(levels, boundaries, NoiseModel::Gauss, 0.4, seed)
        .unwrap()
        .sample()
}

fn time_fit(n: usize) -> f64 {
    let y = staircase(n, 42);
    let opts = FitOptions {
        k_max: Some(100),
        ..FitOptions::default()
    };
    // Best of two, to shave scheduler noise.
    let mut best = f64::INFINITY;
    for _ in 0..2 {
        let t0 = Instant::now();
        let report = fit(&y, &opts).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        assert!(report.result.k_hat >= 1);
        best = best.min(dt);
    }
    best
}

#[test]
fn criterion_09_performance() {
    // Warm up allocator and caches.
    let _ = fit(&staircase(128, 1), &FitOptions::default()).unwrap();

    let t_base = time_fit(769);
    let t_double = time_fit(1538);
    let ratio = t_double / t_base;
    let ok = t_base <= 5.0 && ratio <= 5.0;
    println!(
        "criterion 09 performance: {} — n=769 fit {t_base:.2}s (limit 5s); doubling n scales runtime by {ratio:.2}x (limit 5x)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}
