//! Distribution laws for climate variables: Weibull (wind speed), Saunier
//! (clearness index), Gaussian (temperature, humidity), with fitting,
//! sampling and a chi-square goodness-of-fit test.

mod gaussian;
mod gof;
mod saunier;
mod weibull;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use gaussian::{gaussian_fit, gaussian_fit_values, GaussianParams};
pub use gof::{chi2_from_counts, chi2_gof, GofResult};
pub use saunier::{
    default_kt_max, saunier_fit, saunier_mean, saunier_norm, saunier_solve, SaunierForm,
    SaunierParams,
};
pub use weibull::{weibull_fit, weibull_fit_values, WeibullFit, WeibullParams};

use crate::{stats, Result};

/// Any of the fitted laws, usable wherever a univariate model is needed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DistModel {
    Weibull(WeibullParams),
    Saunier(SaunierParams),
    Gaussian(GaussianParams),
}

impl DistModel {
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            DistModel::Weibull(p) => p.pdf(x),
            DistModel::Saunier(p) => p.pdf_kt(x),
            DistModel::Gaussian(p) => p.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DistModel::Weibull(p) => p.cdf(x),
            DistModel::Saunier(p) => p.cdf_kt(x),
            DistModel::Gaussian(p) => p.cdf(x),
        }
    }

    pub fn quantile(&self, prob: f64) -> f64 {
        match self {
            DistModel::Weibull(p) => p.quantile(prob),
            DistModel::Saunier(p) => p.kt_max * p.quantile(prob),
            DistModel::Gaussian(p) => p.quantile(prob),
        }
    }

    /// Number of parameters estimated from data by the matching fit routine.
    pub fn parameter_count(&self) -> usize {
        match self {
            DistModel::Weibull(_) | DistModel::Gaussian(_) => 2,
            // γ₁ from the mean; Kt_max is user supplied or a percentile
            DistModel::Saunier(_) => 1,
        }
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistModel::Weibull(p) => p.quantile(open_unit(rng)),
            DistModel::Saunier(p) => p.kt_max * p.sample_x(rng),
            DistModel::Gaussian(p) => p.sample_one(rng),
        }
    }
}

/// Uniform draw in the open interval (0, 1).
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `n` draws from `model`, deterministic in `seed`.
///
/// Weibull and Gaussian use the inverse CDF; Saunier uses rejection under
/// a uniform envelope at the density maximum.
pub fn sample_dist(model: &DistModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(crate::Error::invalid("sample size must be at least 1"));
    }
    let mut rng = stats::rng(seed);
    Ok((0..n).map(|_| model.sample_one(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_gaussian_samples_its_mean() {
        let m = DistModel::Gaussian(GaussianParams::new(0.0, 0.0).unwrap());
        assert_eq!(sample_dist(&m, 5, 1).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn exponential_sample_mean() {
        // Weibull(1, 1) is the unit exponential: mean 1, sd 1, so the
        // 3σ Monte Carlo band for n = 1e5 is 0.0095.
        let m = DistModel::Weibull(WeibullParams::new(1.0, 1.0).unwrap());
        let xs = sample_dist(&m, 100_000, 7).unwrap();
        assert!((stats::mean(&xs) - 1.0).abs() < 0.02);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = DistModel::Saunier(saunier_solve(0.5, 0.8).unwrap());
        assert_eq!(
            sample_dist(&m, 50, 3).unwrap(),
            sample_dist(&m, 50, 3).unwrap()
        );
        assert!(sample_dist(&m, 0, 3).is_err());
    }

    fn ks_one_sample(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, x)| {
                let f = cdf(*x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn samples_follow_model_cdf() {
        // one-sample KS at α = 0.01: critical 1.628 / √n
        let n = 100_000;
        let crit = 1.628 / (n as f64).sqrt();
        let models = [
            DistModel::Weibull(WeibullParams::new(2.0, 5.0).unwrap()),
            DistModel::Gaussian(GaussianParams::new(20.0, 3.0).unwrap()),
            DistModel::Saunier(saunier_solve(0.45, 0.75).unwrap()),
            DistModel::Saunier(saunier_solve(0.65, 0.8).unwrap()),
        ];
        for (i, m) in models.iter().enumerate() {
            let mut xs = sample_dist(m, n, 11 + i as u64).unwrap();
            let d = ks_one_sample(&mut xs, |x| m.cdf(x));
            assert!(d < crit, "{m:?}: D = {d}");
        }
    }

    #[test]
    fn cdfs_monotone_with_correct_limits() {
        let models = [
            DistModel::Weibull(WeibullParams::new(0.8, 3.0).unwrap()),
            DistModel::Weibull(WeibullParams::new(3.0, 2.0).unwrap()),
            DistModel::Gaussian(GaussianParams::new(-1.0, 2.0).unwrap()),
            DistModel::Saunier(saunier_solve(0.2, 0.9).unwrap()),
            DistModel::Saunier(saunier_solve(0.7, 0.75).unwrap()),
        ];
        for m in &models {
            let (lo, hi) = match m {
                DistModel::Saunier(p) => (0.0, p.kt_max),
                DistModel::Gaussian(_) => (-60.0, 60.0),
                DistModel::Weibull(_) => (0.0, 200.0),
            };
            assert!(m.cdf(lo).abs() < 1e-9, "{m:?}");
            assert!((m.cdf(hi) - 1.0).abs() < 1e-9, "{m:?}");
            let mut prev = -1e-15;
            for i in 0..=2000 {
                let x = lo + (hi - lo) * i as f64 / 2000.0;
                let f = m.cdf(x);
                assert!(f >= prev - 1e-15, "{m:?} at {x}");
                assert!(m.pdf(x) >= 0.0);
                prev = f;
            }
        }
    }
}
