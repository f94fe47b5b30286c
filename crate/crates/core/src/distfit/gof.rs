use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::DistModel;
use crate::{Error, Result};

/// Smallest expected count a bin may keep before it is merged.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
    /// Bins left after merging.
    pub bins: usize,
}

/// Chi-square test of `sample` against `model` with `n_bins` equiprobable
/// bins (fewer if the sample is too small to give 5 expected per bin).
///
/// The degrees of freedom are reduced by the number of parameters the
/// model's fit routine estimates from data.
pub fn chi2_gof(sample: &[f64], model: &DistModel, n_bins: usize, alpha: f64) -> Result<GofResult> {
    chi2_gof_with(sample, model, n_bins, model.parameter_count(), alpha)
}

pub fn chi2_gof_with(
    sample: &[f64],
    model: &DistModel,
    n_bins: usize,
    fitted_params: usize,
    alpha: f64,
) -> Result<GofResult> {
    if sample.is_empty() {
        return Err(Error::NoData);
    }
    let n = sample.len() as f64;
    let bins = n_bins.min((n / MIN_EXPECTED).floor() as usize).max(1);
    let edges: Vec<f64> = (1..bins)
        .map(|i| model.quantile(i as f64 / bins as f64))
        .collect();
    let mut observed = vec![0.0; bins];
    for &x in sample {
        observed[edges.partition_point(|e| *e <= x)] += 1.0;
    }
    let expected = vec![n / bins as f64; bins];
    chi2_from_counts(&observed, &expected, fitted_params, alpha)
}

/// Chi-square statistic from explicit observed and expected counts.
/// Bins whose expected count is under 5 are merged into a neighbour,
/// starting from the smallest.
pub fn chi2_from_counts(
    observed: &[f64],
    expected: &[f64],
    fitted_params: usize,
    alpha: f64,
) -> Result<GofResult> {
    if observed.len() != expected.len() {
        return Err(Error::invalid(
            "observed and expected counts differ in length",
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    let mut obs = observed.to_vec();
    let mut exp = expected.to_vec();
    while exp.len() >= 2 {
        let (i, min) = exp
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if min >= MIN_EXPECTED {
            break;
        }
        let j = if i == 0 {
            1
        } else if i == exp.len() - 1 || exp[i - 1] <= exp[i + 1] {
            i - 1
        } else {
            i + 1
        };
        exp[j] += exp[i];
        obs[j] += obs[i];
        exp.remove(i);
        obs.remove(i);
    }
    if exp.len() < 2 {
        return Err(Error::Degenerate(
            "fewer than 2 bins left after merging low expected counts".into(),
        ));
    }
    let dof = exp.len() as i64 - 1 - fitted_params as i64;
    if dof < 1 {
        return Err(Error::Degenerate(format!(
            "{} bins leave no degrees of freedom for {fitted_params} fitted parameters",
            exp.len()
        )));
    }
    let statistic: f64 = obs
        .iter()
        .zip(&exp)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let chi = ChiSquared::new(dof as f64).expect("positive dof");
    let p_value = chi.sf(statistic).clamp(0.0, 1.0);
    Ok(GofResult {
        statistic,
        dof: dof as usize,
        p_value,
        alpha,
        pass: p_value >= alpha,
        bins: exp.len(),
    })
}
