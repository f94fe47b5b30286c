use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::acf::{autocorrelations, durbin_levinson};
use super::profile::{Deseasonal, Standardization};
use super::roots::{is_stable, project_stable};
use crate::climdata::{Cadence, ClimateSeries, Variable};
use crate::{Error, Result};

pub const MAX_CSS_ITER: usize = 500;

/// `X(n) = Σ φᵢ X(n−i) + w(n) − Σ θⱼ w(n−j)` on the standardized series,
/// with `w` Gaussian of std `noise_sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaModel {
    pub variable: Variable,
    pub cadence: Cadence,
    pub p: usize,
    pub q: usize,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub noise_sigma: f64,
    pub deseasonal: Deseasonal,
    /// Set when the estimate had to be pulled back into the stationary or
    /// invertible region.
    #[serde(default)]
    pub projected: bool,
    /// Observations used for the fit.
    #[serde(default)]
    pub n: usize,
}

impl ArmaModel {
    /// Model with explicit coefficients, checked for stationarity and
    /// invertibility.
    pub fn new(
        variable: Variable,
        cadence: Cadence,
        phi: Vec<f64>,
        theta: Vec<f64>,
        noise_sigma: f64,
        deseasonal: Deseasonal,
    ) -> Result<Self> {
        if !(noise_sigma >= 0.0) {
            return Err(Error::invalid(format!(
                "noise sigma must be >= 0, got {noise_sigma}"
            )));
        }
        let m = Self {
            variable,
            cadence,
            p: phi.len(),
            q: theta.len(),
            phi,
            theta,
            noise_sigma,
            deseasonal,
            projected: false,
            n: 0,
        };
        if !m.is_stationary() {
            return Err(Error::NonStationary);
        }
        if !is_stable(&m.theta) {
            return Err(Error::invalid("MA polynomial is not invertible"));
        }
        Ok(m)
    }

    pub fn is_stationary(&self) -> bool {
        is_stable(&self.phi)
    }

    /// One-step residuals of the standardized series `x`, with pre-sample
    /// residuals set to zero. The first `p` entries are 0.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        css_residuals(x, &self.phi, &self.theta)
    }
}

fn css_residuals(x: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut e = vec![0.0; x.len()];
    for t in p..x.len() {
        let mut v = x[t];
        for (i, f) in phi.iter().enumerate() {
            v -= f * x[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            if t >= j + 1 + p {
                v += th * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateOptions {
    pub standardization: Option<Standardization>,
}

/// Fit ARMA(p, q) with the default standardization for the cadence.
pub fn estimate(series: &ClimateSeries, p: usize, q: usize) -> Result<ArmaModel> {
    estimate_with(series, p, q, EstimateOptions::default())
}

/// Fit ARMA(p, q) to the standardized series.
///
/// Pure AR models use Yule-Walker; models with an MA part minimize the
/// conditional sum of squares by damped Gauss-Newton from a Hannan-Rissanen
/// start. `p = q = 0` gives a white-noise model.
pub fn estimate_with(
    series: &ClimateSeries,
    p: usize,
    q: usize,
    options: EstimateOptions,
) -> Result<ArmaModel> {
    let kind = options
        .standardization
        .unwrap_or_else(|| Standardization::default_for(series.cadence()));
    let deseasonal = Deseasonal::fit(series, kind)?;
    let x = deseasonal.standardize_series(series);
    let n = x.len();
    if n <= 10 * (p + q).max(1) {
        return Err(Error::invalid(format!(
            "ARMA({p},{q}) needs more than {} observations, got {n}",
            10 * (p + q).max(1)
        )));
    }
    let c0 = x.iter().map(|v| v * v).sum::<f64>() / n as f64
        - (x.iter().sum::<f64>() / n as f64).powi(2);

    let (phi, theta, sigma2) = if q == 0 {
        yule_walker(&x, p, c0)?
    } else {
        css(&x, p, q)?
    };
    let (phi, ar_fixed) = project_stable(&phi);
    let (theta, ma_fixed) = project_stable(&theta);
    Ok(ArmaModel {
        variable: series.variable(),
        cadence: series.cadence(),
        p,
        q,
        phi,
        theta,
        noise_sigma: sigma2.max(0.0).sqrt(),
        deseasonal,
        projected: ar_fixed || ma_fixed,
        n,
    })
}

/// Yule-Walker AR(p) with the innovation variance `c0 (1 − Σ φᵢ rᵢ)`.
pub fn yule_walker(x: &[f64], p: usize, c0: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if p == 0 {
        return Ok((vec![], vec![], c0));
    }
    let r = autocorrelations(x, p)?;
    let (_, phi, _) = durbin_levinson(&r, p);
    let explained: f64 = phi.iter().zip(&r[1..]).map(|(f, r)| f * r).sum();
    Ok((phi, vec![], c0 * (1.0 - explained)))
}

/// Least-squares regression of `y` on the columns of `x`.
fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let qr = x.clone().qr();
    let qty = qr.q().transpose() * y;
    qr.r().solve_upper_triangular(&qty)
}

/// Hannan-Rissanen start: a long AR fit supplies residual estimates, then
/// `x_t` is regressed on its own lags and the lagged residuals.
fn hannan_rissanen(x: &[f64], p: usize, q: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let m = (2 * (p + q)).max(10).min(n / 10).max(p + q);
    let r = autocorrelations(x, m).ok()?;
    let (_, long, _) = durbin_levinson(&r, m);
    let e = css_residuals(x, &long, &[]);
    let start = m + q.max(p);
    if n <= start + p + q + 2 {
        return None;
    }
    let rows = n - start;
    let design = DMatrix::from_fn(rows, p + q, |i, j| {
        let t = start + i;
        if j < p {
            x[t - 1 - j]
        } else {
            // coefficient of e_{t−k} is −θ_k
            -e[t - 1 - (j - p)]
        }
    });
    let y = DVector::from_fn(rows, |i, _| x[start + i]);
    let b = ols(&design, &y)?;
    let phi = b.iter().take(p).copied().collect();
    let theta = b.iter().skip(p).copied().collect();
    Some((phi, theta))
}

/// Conditional sum of squares by Levenberg-Marquardt damped Gauss-Newton.
fn css(x: &[f64], p: usize, q: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = x.len();
    let k = p + q;
    let (phi0, theta0) = hannan_rissanen(x, p, q).unwrap_or((vec![0.0; p], vec![0.0; q]));
    let (phi0, _) = project_stable(&phi0);
    let (theta0, _) = project_stable(&theta0);
    let mut beta: Vec<f64> = phi0.into_iter().chain(theta0).collect();

    let ss = |b: &[f64]| -> f64 {
        let e = css_residuals(x, &b[..p], &b[p..]);
        let s: f64 = e[p..].iter().map(|v| v * v).sum();
        if s.is_finite() {
            s
        } else {
            f64::INFINITY
        }
    };

    let mut current = ss(&beta);
    let mut lambda: f64 = 1e-3;
    let mut converged = false;
    for _ in 0..MAX_CSS_ITER {
        let (phi, theta) = beta.split_at(p);
        let e = css_residuals(x, phi, theta);
        // de_t/dβ by the recursion of the residual equation
        let mut d = vec![vec![0.0; n]; k];
        for t in p..n {
            for i in 0..p {
                let mut v = -x[t - 1 - i];
                for (j, th) in theta.iter().enumerate() {
                    if t >= j + 1 + p {
                        v += th * d[i][t - 1 - j];
                    }
                }
                d[i][t] = v;
            }
            for jj in 0..q {
                let mut v = if t >= jj + 1 + p { e[t - 1 - jj] } else { 0.0 };
                for (j, th) in theta.iter().enumerate() {
                    if t >= j + 1 + p {
                        v += th * d[p + jj][t - 1 - j];
                    }
                }
                d[p + jj][t] = v;
            }
        }
        let mut jtj = DMatrix::<f64>::zeros(k, k);
        let mut jte = DVector::<f64>::zeros(k);
        for t in p..n {
            for a in 0..k {
                jte[a] += d[a][t] * e[t];
                for b in a..k {
                    jtj[(a, b)] += d[a][t] * d[b][t];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                jtj[(a, b)] = jtj[(b, a)];
            }
        }

        let mut accepted = false;
        while lambda < 1e12 {
            let mut m = jtj.clone();
            for a in 0..k {
                m[(a, a)] += lambda * jtj[(a, a)].max(1e-12);
            }
            let Some(step) = m.cholesky().map(|c| c.solve(&(-&jte))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + s).collect();
            let s = ss(&trial);
            if s < current {
                let gain = current - s;
                let step_norm = step.norm();
                beta = trial;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if gain <= 1e-12 * current || step_norm < 1e-9 {
                    converged = true;
                }
                current = s;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "CSS estimation of ARMA({p},{q}) did not converge in {MAX_CSS_ITER} iterations"
        )));
    }
    let sigma2 = current / (n - p) as f64;
    let theta = beta.split_off(p);
    Ok((beta, theta, sigma2))
}
