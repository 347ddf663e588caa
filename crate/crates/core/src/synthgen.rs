//! Synthetic piecewise-constant benchmark series with recorded seeds.
//!
//! The six named profiles share one three-segment shape (levels -1, +1, 0
//! over the first quarter, second quarter and last half) and differ in
//! noise family and scale: Gaussian or Cauchy at 0.1, 0.32 or 1.0.

use crate::error::{Error, Result};
use crate::numerics::NoiseModel;
use crate::segment_evidence::DataSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The six named benchmark profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Gl,
    Gm,
    Gh,
    Cl,
    Cm,
    Ch,
}

impl Profile {
    pub const ALL: [Profile; 6] = [
        Profile::Gl,
        Profile::Gm,
        Profile::Gh,
        Profile::Cl,
        Profile::Cm,
        Profile::Ch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Gl => "gl",
            Profile::Gm => "gm",
            Profile::Gh => "gh",
            Profile::Cl => "cl",
            Profile::Cm => "cm",
            Profile::Ch => "ch",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Profile::Gl),
            "gm" => Ok(Profile::Gm),
            "gh" => Ok(Profile::Gh),
            "cl" => Ok(Profile::Cl),
            "cm" => Ok(Profile::Cm),
            "ch" => Ok(Profile::Ch),
            other => Err(Error::Domain(format!(
                "unknown profile '{other}'; expected one of gl, gm, gh, cl, cm, ch"
            ))),
        }
    }

    pub fn noise_kind(self) -> NoiseModel {
        match self {
            Profile::Gl | Profile::Gm | Profile::Gh => NoiseModel::Gauss,
            Profile::Cl | Profile::Cm | Profile::Ch => NoiseModel::Cauchy,
        }
    }

    pub fn noise_scale(self) -> f64 {
        match self {
            Profile::Gl | Profile::Cl => 0.1,
            Profile::Gm | Profile::Cm => 0.32,
            Profile::Gh | Profile::Ch => 1.0,
        }
    }

    /// Versioned default seed, so documented benchmark numbers stay
    /// stable across runs of the shipped tooling.
    pub fn default_seed(self) -> u64 {
        match self {
            Profile::Gl => 101,
            Profile::Gm => 102,
            Profile::Gh => 103,
            Profile::Cl => 201,
            Profile::Cm => 202,
            Profile::Ch => 203,
        }
    }

    /// The three-segment ground truth at length `n` (boundaries at the
    /// quarter and half point; the benchmark default is n = 100).
    pub fn ground_truth(self, n: usize, seed: u64) -> Result<GroundTruth> {
        if n < 4 {
            return Err(Error::Domain(format!(
                "profile series need n >= 4; got {n}"
            )));
        }
        GroundTruth::new(
            vec![-1.0, 1.0, 0.0],
            vec![0, n / 4, n / 2, n],
            self.noise_kind(),
            self.noise_scale(),
            seed,
        )
    }
}

/// A piecewise-constant truth plus the noise model that corrupts it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub levels: Vec<f64>,
    pub boundaries: Vec<usize>,
    pub noise_kind: NoiseModel,
    pub noise_scale: f64,
    pub seed: u64,
}

impl GroundTruth {
    pub fn new(
        levels: Vec<f64>,
        boundaries: Vec<usize>,
        noise_kind: NoiseModel,
        noise_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if boundaries.len() != levels.len() + 1 {
            return Err(Error::Domain(format!(
                "{} levels need {} boundaries; got {}",
                levels.len(),
                levels.len() + 1,
                boundaries.len()
            )));
        }
        if boundaries[0] != 0 || !boundaries.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "boundaries must be strictly increasing from 0".into(),
            ));
        }
        if !noise_scale.is_finite() || noise_scale < 0.0 {
            return Err(Error::Domain(format!(
                "noise scale must be finite and >= 0; got {noise_scale}"
            )));
        }
        Ok(Self {
            levels,
            boundaries,
            noise_kind,
            noise_scale,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        false // boundaries end strictly above 0
    }

    /// The clean function values f_1..f_n.
    pub fn function(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.len()];
        for (m, &level) in self.levels.iter().enumerate() {
            for slot in f
                .iter_mut()
                .take(self.boundaries[m + 1])
                .skip(self.boundaries[m])
            {
                *slot = level;
            }
        }
        f
    }

    /// Draw the noisy series. Deterministic in the recorded seed; Cauchy
    /// noise comes from the inverse CDF (tangent of a uniform).
    pub fn sample(&self) -> DataSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let values = self
            .function()
            .into_iter()
            .map(|f| f + self.noise_scale * standard_draw(&mut rng, self.noise_kind))
            .collect();
        DataSeries::new(values).expect("finite truth plus finite noise")
    }
}

fn standard_draw(rng: &mut ChaCha8Rng, kind: NoiseModel) -> f64 {
    match kind {
        NoiseModel::Gauss => rng.sample::<f64, _>(StandardNormal),
        NoiseModel::Cauchy => {
            // Inverse CDF; u is in [0, 1), so shift keeps tan finite.
            let u: f64 = rng.random();
            (std::f64::consts::PI * (u - 0.5)).tan()
        }
    }
}

/// Generate a named profile series of length `n`.
pub fn generate(profile: Profile, seed: u64, n: usize) -> Result<(DataSeries, GroundTruth)> {
    let truth = profile.ground_truth(n, seed)?;
    let series = truth.sample();
    Ok((series, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_profile_metadata() {
        let (y, truth) = generate(Profile::Gl, 7, 100).unwrap();
        assert_eq!(y.len(), 100);
        assert_eq!(truth.boundaries, vec![0, 25, 50, 100]);
        assert_eq!(truth.levels, vec![-1.0, 1.0, 0.0]);
        assert_eq!(truth.noise_scale, 0.1);
        assert_eq!(truth.noise_kind, NoiseModel::Gauss);
    }

    #[test]
    fn zero_noise_reproduces_the_function() {
        let truth =
            GroundTruth::new(vec![2.0, -3.0], vec![0, 4, 10], NoiseModel::Gauss, 0.0, 5).unwrap();
        let y = truth.sample();
        assert_eq!(y.values(), truth.function().as_slice());
        assert_eq!(y.values()[3], 2.0);
        assert_eq!(y.values()[4], -3.0);
    }

    #[test]
    fn same_seed_same_series() {
        let (a, _) = generate(Profile::Cm, 42, 100).unwrap();
        let (b, _) = generate(Profile::Cm, 42, 100).unwrap();
        let (c, _) = generate(Profile::Cm, 43, 100).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn gaussian_noise_scale_checks_out_at_bulk() {
        let truth = Profile::Gm.ground_truth(100_000, 11).unwrap();
        let y = truth.sample();
        let f = truth.function();
        let resid: Vec<f64> = y.values().iter().zip(&f).map(|(a, b)| a - b).collect();
        let mean = resid.iter().sum::<f64>() / resid.len() as f64;
        let var = resid.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
            / (resid.len() - 1) as f64;
        let sd = var.sqrt();
        assert!(
            (sd - 0.32).abs() <= 0.02 * 0.32,
            "sample std {sd} vs sigma 0.32"
        );
    }

    #[test]
    fn cauchy_noise_median_checks_out_at_bulk() {
        // The median of |standard Cauchy| is 1, so median |residual| ~ sigma.
        let truth = Profile::Ch.ground_truth(100_000, 13).unwrap();
        let y = truth.sample();
        let f = truth.function();
        let mut abs_resid: Vec<f64> =
            y.values().iter().zip(&f).map(|(a, b)| (a - b).abs()).collect();
        abs_resid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = abs_resid[abs_resid.len() / 2];
        assert!(
            (median - 1.0).abs() <= 0.25,
            "median abs residual {median} vs scale 1.0"
        );
    }

    #[test]
    fn rejects_inconsistent_truth() {
        assert!(GroundTruth::new(vec![1.0], vec![0, 5, 9], NoiseModel::Gauss, 0.1, 0).is_err());
        assert!(GroundTruth::new(vec![1.0, 2.0], vec![0, 5, 5], NoiseModel::Gauss, 0.1, 0).is_err());
        assert!(Profile::parse("gx").is_err());
        assert_eq!(Profile::parse("GL").unwrap(), Profile::Gl);
    }
}
