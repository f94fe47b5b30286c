use serde::{Deserialize, Serialize};

use crate::climdata::ClimateSeries;
use crate::{Error, Result};

/// Two-sided 5 % normal quantile used by the Bartlett and Quenouille bands.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    pub max_lag: usize,
    /// Autocorrelations at lags 0..=max_lag.
    pub r: Vec<f64>,
    /// Partial autocorrelations at lags 0..=max_lag (lag 0 is 1).
    pub pacf: Vec<f64>,
    /// Bartlett half-width per lag, 0 at lag 0.
    pub bartlett_bounds: Vec<f64>,
    pub quenouille_bound: f64,
    pub n: usize,
    /// Set when fewer than 4 observations per lag are available.
    pub short_sample: bool,
}

impl AcfResult {
    /// Bands and PACF for an autocorrelation sequence `r` (with `r[0] = 1`)
    /// estimated from `n` observations.
    pub fn from_autocorrelations(r: Vec<f64>, n: usize) -> Result<Self> {
        if r.is_empty() || (r[0] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("autocorrelations must start with r(0) = 1"));
        }
        if n == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        let max_lag = r.len() - 1;
        let (pacf, _, _) = durbin_levinson(&r, max_lag);
        let nf = n as f64;
        let mut bartlett_bounds = vec![0.0; max_lag + 1];
        let mut cum = 0.0;
        for k in 1..=max_lag {
            bartlett_bounds[k] = Z95 * ((1.0 + 2.0 * cum) / nf).sqrt();
            cum += r[k] * r[k];
        }
        let mut full = vec![1.0];
        full.extend(pacf);
        Ok(Self {
            max_lag,
            r,
            pacf: full,
            bartlett_bounds,
            quenouille_bound: Z95 / nf.sqrt(),
            n,
            short_sample: n < 4 * max_lag,
        })
    }
}

/// Sample autocorrelations `r(k) = Σ(x_t − x̄)(x_{t+k} − x̄) / Σ(x_t − x̄)²`
/// at lags 0..=max_lag.
pub fn autocorrelations(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::invalid("autocorrelation needs at least 2 values"));
    }
    if max_lag >= x.len() {
        return Err(Error::invalid(format!(
            "max lag {max_lag} must be below the series length {}",
            x.len()
        )));
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if c0 <= (1e-12 * scale).powi(2) * x.len() as f64 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            let ck: f64 = dev[..dev.len() - k]
                .iter()
                .zip(&dev[k..])
                .map(|(a, b)| a * b)
                .sum();
            (ck / c0).clamp(-1.0, 1.0)
        })
        .collect())
}

/// Autocorrelation, partial autocorrelation and significance bands.
/// The series must have no missing values.
pub fn acf_pacf(series: &ClimateSeries, max_lag: usize) -> Result<AcfResult> {
    if series.missing_count() > 0 {
        return Err(Error::invalid(format!(
            "{} has {} missing values; fill or select before computing autocorrelations",
            series.variable(),
            series.missing_count()
        )));
    }
    acf_pacf_values(&series.present(), max_lag)
}

pub fn acf_pacf_values(x: &[f64], max_lag: usize) -> Result<AcfResult> {
    let r = autocorrelations(x, max_lag)?;
    AcfResult::from_autocorrelations(r, x.len())
}

/// Durbin-Levinson recursion on `r[0..=order]`.
///
/// Returns the partial autocorrelations at lags 1..=order, the AR(order)
/// Yule-Walker coefficients, and the innovation variance ratio
/// `Π(1 − φ_kk²)`. If the recursion hits a singular step the remaining
/// partial autocorrelations are 0.
pub fn durbin_levinson(r: &[f64], order: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let mut pacf = Vec::with_capacity(order);
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut v = 1.0;
    for k in 1..=order {
        let num = r[k]
            - phi
                .iter()
                .enumerate()
                .map(|(j, p)| p * r[k - 1 - j])
                .sum::<f64>();
        if v <= 1e-14 {
            pacf.push(0.0);
            phi.push(0.0);
            continue;
        }
        let a = num / v;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - a * prev[k - 2 - j];
        }
        phi.push(a);
        pacf.push(a);
        v *= 1.0 - a * a;
    }
    (pacf, phi, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;
    use nalgebra::{DMatrix, DVector};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn hand_lag_one() {
        let r = autocorrelations(&[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((r[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn constant_series_rejected() {
        assert!(matches!(
            autocorrelations(&[2.0; 10], 2),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn one_durbin_levinson_step() {
        let (pacf, phi, _) = durbin_levinson(&[1.0, 0.5, 0.4], 2);
        assert!((pacf[0] - 0.5).abs() < 1e-15);
        assert!((pacf[1] - 0.2).abs() < 1e-15);
        // φ₂₁ = φ₁₁ − φ₂₂φ₁₁
        assert!((phi[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn pacf_matches_explicit_yule_walker() {
        // at each order k the last coefficient of the solved k×k Toeplitz
        // system is the lag-k partial autocorrelation
        let mut rng = stats::rng(99);
        for _ in 0..100 {
            let x: Vec<f64> = (0..60).map(|_| StandardNormal.sample(&mut rng)).collect();
            let y: Vec<f64> = x
                .windows(3)
                .map(|w| w[0] + 0.5 * w[1] - 0.3 * w[2])
                .collect();
            let r = autocorrelations(&y, 10).unwrap();
            let (pacf, _, _) = durbin_levinson(&r, 10);
            for k in 1..=10 {
                let m = DMatrix::from_fn(k, k, |i, j| r[i.abs_diff(j)]);
                let b = DVector::from_fn(k, |i, _| r[i + 1]);
                let sol = m.lu().solve(&b).unwrap();
                assert!((sol[k - 1] - pacf[k - 1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn white_noise_pacf_within_quenouille() {
        // each lag leaves the band with probability 0.05, so 18 or more of
        // 20 lags stay inside with probability P(Bin(20, 0.05) <= 2) = 0.925
        let mut good = 0;
        for seed in 0..100 {
            let mut rng = stats::rng(seed);
            let x: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = acf_pacf_values(&x, 20).unwrap();
            assert!((a.quenouille_bound - 1.96 / 1000f64.sqrt()).abs() < 1e-15);
            assert!(!a.short_sample);
            let inside = (1..=20)
                .filter(|k| a.pacf[*k].abs() < a.quenouille_bound)
                .count();
            if inside >= 18 {
                good += 1;
            }
        }
        assert!(good >= 85, "{good}");
    }

    #[test]
    fn bartlett_bounds_grow() {
        let a = AcfResult::from_autocorrelations(vec![1.0, 0.5, 0.25], 100).unwrap();
        assert!((a.bartlett_bounds[1] - 0.196).abs() < 1e-12);
        assert!((a.bartlett_bounds[2] - 0.196 * 1.5f64.sqrt()).abs() < 1e-12);
    }
}
