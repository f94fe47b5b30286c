use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::climdata::ClimateSeries;
use crate::{Error, Result};

/// Below this many values the fit still runs but is flagged.
pub const MIN_RECOMMENDED_SAMPLE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    /// Shape.
    pub k: f64,
    /// Scale, in the units of the variable.
    pub c: f64,
}

impl WeibullParams {
    pub fn new(k: f64, c: f64) -> Result<Self> {
        if !(k > 0.0 && c > 0.0 && k.is_finite() && c.is_finite()) {
            return Err(Error::invalid(format!(
                "Weibull parameters must be positive, got k={k}, c={c}"
            )));
        }
        Ok(Self { k, c })
    }

    pub fn pdf(&self, v: f64) -> f64 {
        if v < 0.0 {
            return 0.0;
        }
        if v == 0.0 {
            return match self.k {
                k if k < 1.0 => f64::INFINITY,
                1.0 => 1.0 / self.c,
                _ => 0.0,
            };
        }
        let z = v / self.c;
        (self.k / self.c) * z.powf(self.k - 1.0) * (-z.powf(self.k)).exp()
    }

    pub fn cdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        -(-(v / self.c).powf(self.k)).exp_m1()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        self.c * (-(-p).ln_1p()).powf(1.0 / self.k)
    }

    pub fn mean(&self) -> f64 {
        self.c * gamma(1.0 + 1.0 / self.k)
    }
}

/// Result of a Weibull fit, with the bookkeeping a caller may want to report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullFit {
    pub params: WeibullParams,
    /// Positive values used by the likelihood.
    pub n: usize,
    /// Exact zeros (calms) left out of the likelihood.
    pub zeros: usize,
    /// Set when `n` is under [`MIN_RECOMMENDED_SAMPLE`].
    pub small_sample: bool,
    pub iterations: usize,
}

pub fn weibull_fit(sample: &ClimateSeries) -> Result<WeibullFit> {
    weibull_fit_values(&sample.present())
}

/// Maximum-likelihood Weibull fit.
///
/// The shape solves the profile equation
/// `Σ xᵏ ln x / Σ xᵏ − 1/k − mean(ln x) = 0`, which is increasing in k,
/// by Newton steps kept inside a bisection bracket. The scale follows in
/// closed form. Values are divided by their maximum first so that `xᵏ`
/// cannot overflow for large k.
pub fn weibull_fit_values(values: &[f64]) -> Result<WeibullFit> {
    if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "Weibull sample must be finite and non-negative, found {bad}"
        )));
    }
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    let zeros = values.len() - positive.len();
    if positive.is_empty() {
        return Err(Error::Degenerate(
            "Weibull sample has no positive value".into(),
        ));
    }
    let xmax = positive.iter().copied().fold(0.0, f64::max);
    let xmin = positive.iter().copied().fold(f64::INFINITY, f64::min);
    if xmin == xmax {
        return Err(Error::Degenerate(
            "Weibull sample needs at least two distinct positive values".into(),
        ));
    }
    let logs: Vec<f64> = positive.iter().map(|x| (x / xmax).ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;

    // g(k) and g'(k); the weights y^k = exp(k ln y) are at most 1
    let profile = |k: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let r = s1 / s0;
        (r - 1.0 / k - mean_log, s2 / s0 - r * r + 1.0 / (k * k))
    };

    let sd_log = {
        let var = logs.iter().map(|l| (l - mean_log).powi(2)).sum::<f64>() / logs.len() as f64;
        var.sqrt()
    };
    let mut k = (std::f64::consts::PI / (6f64.sqrt() * sd_log)).clamp(1e-3, 1e3);
    let (mut lo, mut hi) = (k, k);
    while profile(lo).0 > 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::Convergence("Weibull shape bracket underflow".into()));
        }
    }
    while profile(hi).0 < 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Convergence("Weibull shape bracket overflow".into()));
        }
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Convergence(format!(
                "Weibull shape did not converge (bracket [{lo}, {hi}])"
            )));
        }
        let (g, dg) = profile(k);
        if g < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - g / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - k).abs();
        k = next;
        if step < 1e-8 || hi - lo < 1e-8 {
            break;
        }
    }

    let mean_pow = logs.iter().map(|l| (k * l).exp()).sum::<f64>() / logs.len() as f64;
    let c = xmax * mean_pow.powf(1.0 / k);
    Ok(WeibullFit {
        params: WeibullParams::new(k, c)?,
        n: positive.len(),
        zeros,
        small_sample: positive.len() < MIN_RECOMMENDED_SAMPLE,
        iterations,
    })
}
