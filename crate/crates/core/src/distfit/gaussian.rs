use rand::Rng;
use serde::{Deserialize, Serialize};

use super::open_unit;
use crate::climdata::ClimateSeries;
use crate::{stats, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "invalid Gaussian parameters mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if self.sigma == 0.0 {
            return if x == self.mu { f64::INFINITY } else { 0.0 };
        }
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.sigma == 0.0 {
            return if x < self.mu { 0.0 } else { 1.0 };
        }
        stats::normal_cdf((x - self.mu) / self.sigma)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if self.sigma == 0.0 {
            return self.mu;
        }
        self.mu + self.sigma * stats::normal_quantile(p)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return self.mu;
        }
        self.quantile(open_unit(rng))
    }
}

/// Sample mean and (n − 1) standard deviation of the present values.
pub fn gaussian_fit(sample: &ClimateSeries) -> Result<GaussianParams> {
    gaussian_fit_values(&sample.present())
}

pub fn gaussian_fit_values(values: &[f64]) -> Result<GaussianParams> {
    if values.len() < 2 {
        return Err(Error::invalid("Gaussian fit needs at least 2 values"));
    }
    GaussianParams::new(stats::mean(values), stats::std_dev(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_hand_example() {
        let p = gaussian_fit_values(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.mu, 2.0);
        assert!((p.sigma - 1.0).abs() < 1e-15);
        assert!(gaussian_fit_values(&[1.0]).is_err());
    }

    #[test]
    fn cdf_and_quantile() {
        let p = GaussianParams::new(10.0, 2.0).unwrap();
        assert!((p.cdf(10.0) - 0.5).abs() < 1e-15);
        assert!((p.quantile(0.975) - (10.0 + 2.0 * 1.959_963_984_540_054)).abs() < 1e-9);
        assert!(GaussianParams::new(0.0, -1.0).is_err());
    }
}
