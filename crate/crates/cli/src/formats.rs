//! File formats: the single-column input CSV, the result document with
//! canonical JSON serialization, and the CSV outputs.

use crate::CliError;
use bpcr_core::{DataSeries, FitReport, ScanPoint};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Read the input series: one decimal value per row, optional `y` header.
pub fn read_series_csv(path: &Path) -> Result<DataSeries, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        if idx == 0 && cell.eq_ignore_ascii_case("y") {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::Input(format!(
                    "{}: line {}: non-finite value '{v}'",
                    path.display(),
                    idx + 1
                )))
            }
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{}: line {}: cannot parse '{cell}' as a number",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    DataSeries::new(values).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparametersDoc {
    pub nu: f64,
    pub rho: f64,
    pub sigma: f64,
}

/// The `result.json` document. Field order is the canonical key order;
/// floats are serialized with 17 significant digits so that parsing and
/// re-serializing reproduces the bytes exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub n: usize,
    pub noise: String,
    pub prior: String,
    pub estimator: String,
    pub curve_mode: String,
    pub k_max: usize,
    pub hyperparameters: HyperparametersDoc,
    pub log_evidence: f64,
    pub k_hat: usize,
    pub ck: Vec<f64>,
    pub t_hat: Vec<usize>,
    pub seg_mean: Vec<Option<f64>>,
    pub seg_std: Vec<Option<f64>>,
    pub ll: f64,
    pub ll_mean: f64,
    pub ll_std: f64,
    pub ll_rel: f64,
}

impl ResultDoc {
    pub fn from_report(report: &FitReport) -> Self {
        let r = &report.result;
        Self {
            n: report.n,
            noise: report.noise.name().to_string(),
            prior: report.prior.name().to_string(),
            estimator: report.estimator.name().to_string(),
            curve_mode: report.curve_mode.name().to_string(),
            k_max: report.k_max,
            hyperparameters: HyperparametersDoc {
                nu: report.hyperparameters.nu,
                rho: report.hyperparameters.rho,
                sigma: report.hyperparameters.sigma,
            },
            log_evidence: r.log_evidence,
            k_hat: r.k_hat,
            ck: r.ck.clone(),
            t_hat: r.t_hat.clone(),
            seg_mean: r.segments.iter().map(|s| s.mean).collect(),
            seg_std: r.segments.iter().map(|s| s.std).collect(),
            ll: r.loglik.ll,
            ll_mean: r.loglik.ll_mean,
            ll_std: r.loglik.ll_std,
            ll_rel: r.loglik.ll_rel,
        }
    }
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with fixed key order and 17-significant-digit floats.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Internal(format!("serializing result.json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// `curve.csv`: position, observation, curve mean and standard deviation.
pub fn curve_csv(y: &DataSeries, report: &FitReport) -> String {
    let r = &report.result;
    let mut out = String::from("t,y,curve_mean,curve_std\n");
    for (t, &obs) in y.values().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            t + 1,
            obs,
            r.curve_mean[t],
            r.curve_std[t]
        );
    }
    out
}

/// `breaks.csv`: aggregate inner-break probability per boundary position.
pub fn breaks_csv(report: &FitReport) -> String {
    let mut out = String::from("t,b_total\n");
    for (t, &b) in report.result.b_total.iter().enumerate() {
        let _ = writeln!(out, "{t},{b}");
    }
    out
}

/// `scan.csv`: evidence and MAP segment count per noise scale; the row
/// at the estimated scale is marked.
pub fn scan_csv(points: &[ScanPoint], sigma_hat: f64) -> String {
    let mut out = String::from("sigma,log_evidence,k_hat,is_sigma_hat\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.sigma,
            p.log_evidence,
            p.k_hat,
            u8::from(p.sigma == sigma_hat)
        );
    }
    out
}

/// Synthetic series CSV: a `y` header and one value per row.
pub fn series_csv(y: &DataSeries) -> String {
    let mut out = String::from("y\n");
    for v in y.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_json_pins_float_format_and_nulls() {
        #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
        struct Probe {
            a: f64,
            b: Vec<Option<f64>>,
            c: usize,
        }
        let probe = Probe {
            a: 0.5,
            b: vec![Some(-48.33), None],
            c: 7,
        };
        let bytes = to_canonical_json(&probe).unwrap();
        assert_eq!(
            String::from_utf8(bytes.clone()).unwrap(),
            "{\"a\":5.0000000000000000e-1,\"b\":[-4.8329999999999998e1,null],\"c\":7}\n"
        );
        let parsed: Probe = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(parsed, probe);
        assert_eq!(to_canonical_json(&parsed).unwrap(), bytes);
    }

    #[test]
    fn header_is_optional_and_case_insensitive() {
        let dir = tempfile::tempdir().unwrap();
        let with = dir.path().join("with.csv");
        let without = dir.path().join("without.csv");
        std::fs::write(&with, "Y\n1.5\n2.5\n").unwrap();
        std::fs::write(&without, "1.5\n2.5\n").unwrap();
        let a = read_series_csv(&with).unwrap();
        let b = read_series_csv(&without).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.values(), &[1.5, 2.5]);
    }

    #[test]
    fn empty_file_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "y\n").unwrap();
        assert!(matches!(read_series_csv(&path), Err(CliError::Input(_))));
    }
}
