use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use super::acf::{autocorrelations, Z95};
use super::model::ArmaModel;
use crate::climdata::ClimateSeries;
use crate::{Error, Result};

pub const DIAGNOSE_LAGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Residual autocorrelations at lags 1..=20.
    pub acf: Vec<f64>,
    /// Bartlett half-width at each of those lags.
    pub band: Vec<f64>,
    pub exceedances: usize,
    pub allowed: usize,
    pub pass: bool,
    pub ljung_box: f64,
    pub ljung_box_dof: usize,
    pub ljung_box_p: f64,
    pub residual_std: f64,
}

/// Number of band exceedances out of `lags` that white noise stays within
/// with probability at least 95 %.
///
/// Each lag leaves the 95 % band with probability 0.05, so a single
/// exceedance in 20 lags is unremarkable: white residuals show two or more
/// in about a quarter of samples. The allowance is the smallest `m` with
/// `P(Binomial(lags, 0.05) > m) ≤ 0.05`, which is 3 for 20 lags.
pub fn allowed_exceedances(lags: usize) -> usize {
    let b = Binomial::new(0.05, lags as u64).expect("valid binomial");
    (0..=lags)
        .find(|m| 1.0 - b.cdf(*m as u64) <= 0.05)
        .unwrap_or(lags)
}

/// Residual whiteness check of `model` on `series`.
pub fn diagnose(model: &ArmaModel, series: &ClimateSeries) -> Result<ResidualReport> {
    if series.variable() != model.variable {
        return Err(Error::invalid(format!(
            "model is for {}, series is {}",
            model.variable,
            series.variable()
        )));
    }
    let x = model.deseasonal.standardize_series(series);
    let e = model.residuals(&x);
    diagnose_residuals(&e[model.p..], model.p + model.q)
}

/// Whiteness check on a residual sequence; `fitted` is the number of ARMA
/// coefficients, used for the Ljung-Box degrees of freedom.
pub fn diagnose_residuals(e: &[f64], fitted: usize) -> Result<ResidualReport> {
    let n = e.len();
    if n <= DIAGNOSE_LAGS + 1 {
        return Err(Error::invalid(format!(
            "residual diagnosis needs more than {} values",
            DIAGNOSE_LAGS + 1
        )));
    }
    let nf = n as f64;
    let mean = e.iter().sum::<f64>() / nf;
    let residual_std = (e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
    let r = match autocorrelations(e, DIAGNOSE_LAGS) {
        Ok(r) => r,
        // all-zero residuals are perfectly white
        Err(Error::Degenerate(_)) => vec![0.0; DIAGNOSE_LAGS + 1],
        Err(err) => return Err(err),
    };
    let mut band = Vec::with_capacity(DIAGNOSE_LAGS);
    let mut cum = 0.0;
    let mut q_stat = 0.0;
    for k in 1..=DIAGNOSE_LAGS {
        band.push(Z95 * ((1.0 + 2.0 * cum) / nf).sqrt());
        cum += r[k] * r[k];
        q_stat += r[k] * r[k] / (nf - k as f64);
    }
    let q_stat = nf * (nf + 2.0) * q_stat;
    let exceedances = (1..=DIAGNOSE_LAGS)
        .filter(|k| r[*k].abs() > band[k - 1])
        .count();
    let allowed = allowed_exceedances(DIAGNOSE_LAGS);
    let dof = DIAGNOSE_LAGS.saturating_sub(fitted).max(1);
    let ljung_box_p = ChiSquared::new(dof as f64)
        .expect("positive dof")
        .sf(q_stat);
    Ok(ResidualReport {
        acf: r[1..].to_vec(),
        band,
        exceedances,
        allowed,
        pass: exceedances <= allowed,
        ljung_box: q_stat,
        ljung_box_dof: dof,
        ljung_box_p,
        residual_std,
    })
}
