use rand::Rng;
use serde::{Deserialize, Serialize};

use super::open_unit;
use crate::climdata::ClimateSeries;
use crate::{stats, Error, Result};

/// Within this |γ| the closed forms lose too many digits to cancellation
/// and the power series is used instead.
const SERIES_LIMIT: f64 = 1.0;
const SERIES_TERMS: usize = 30;
const SOLVE_TOL: f64 = 1e-8;
const SOLVE_MAX_ITER: usize = 200;
const GAMMA_LIMIT: f64 = 1e6;

/// Which density shape to evaluate.
///
/// `Normalized` is `C₁·x(1−x)·e^{γ₁x}`, the shape whose normalization and
/// mean are exactly the `C₁` and `x_moy` formulas. `Printed` is
/// `C₁·(x − x_moy)·e^{γ₁x}`, kept only for comparison: it is negative below
/// `x_moy` and cannot be normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaunierForm {
    #[default]
    Normalized,
    Printed,
}

/// Clearness-index law on the reduced variable `x = Kt / Kt_max ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaunierParams {
    pub gamma1: f64,
    /// Normalization constant. Underflows to 0 for very large γ₁; the
    /// density itself is evaluated in log space and is unaffected.
    pub c1: f64,
    pub x_moy: f64,
    pub kt_moy: f64,
    pub kt_max: f64,
}

/// `I₁(γ) = ∫₀¹ x(1−x)e^{γx} dx`, as `(ln I₁)`.
fn ln_i1(g: f64) -> f64 {
    if g.abs() <= SERIES_LIMIT {
        series(g, 2).ln()
    } else if g > 0.0 {
        // e^γ · ((γ−2) + (γ+2)e^{−γ}) / γ³
        g + ((g - 2.0) + (g + 2.0) * (-g).exp()).ln() - 3.0 * g.ln()
    } else {
        (((g - 2.0) * g.exp() + g + 2.0) / g.powi(3)).ln()
    }
}

/// `Σ γⁿ/n! · 1/((n+a)(n+a+1))`: a = 2 gives I₁, a = 3 gives I₂.
fn series(g: f64, a: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..SERIES_TERMS {
        if n > 0 {
            term *= g / n as f64;
        }
        sum += term / ((n + a) * (n + a + 1)) as f64;
    }
    sum
}

/// Mean of the reduced variable, `x_moy(γ) = I₂/I₁`.
///
/// Matches the closed form
/// `((γ²−4γ+6)e^γ − 2γ − 6) / (γ((γ−2)e^γ + γ + 2))`.
pub fn saunier_mean(g: f64) -> f64 {
    if g.abs() <= SERIES_LIMIT {
        series(g, 3) / series(g, 2)
    } else if g > 0.0 {
        let e = (-g).exp();
        let j1 = (g - 2.0) + (g + 2.0) * e;
        let j2 = (g * g - 4.0 * g + 6.0) - (2.0 * g + 6.0) * e;
        j2 / (g * j1)
    } else {
        let e = g.exp();
        let i1 = (g - 2.0) * e + g + 2.0;
        let i2 = (g * g - 4.0 * g + 6.0) * e - 2.0 * g - 6.0;
        i2 / (g * i1)
    }
}

/// Normalization constant `C₁ = γ³ / ((γ−2)e^γ + γ + 2)`, 6 at γ = 0.
pub fn saunier_norm(g: f64) -> f64 {
    (-ln_i1(g)).exp()
}

impl SaunierParams {
    pub fn from_gamma(gamma1: f64, kt_max: f64) -> Result<Self> {
        if !gamma1.is_finite() || !(kt_max > 0.0 && kt_max <= 1.0) {
            return Err(Error::invalid(format!(
                "invalid Saunier parameters gamma1={gamma1}, kt_max={kt_max}"
            )));
        }
        let x_moy = saunier_mean(gamma1);
        Ok(Self {
            gamma1,
            c1: saunier_norm(gamma1),
            x_moy,
            kt_moy: x_moy * kt_max,
            kt_max,
        })
    }

    /// Density of the reduced variable.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        x * (1.0 - x) * (self.gamma1 * x - ln_i1(self.gamma1)).exp()
    }

    /// Density in the requested form. The printed form takes negative values.
    pub fn pdf_with(&self, form: SaunierForm, x: f64) -> f64 {
        match form {
            SaunierForm::Normalized => self.pdf(x),
            SaunierForm::Printed => self.c1 * (x - self.x_moy) * (self.gamma1 * x).exp(),
        }
    }

    /// Normalization constant for the given form.
    pub fn normalizing_constant(&self, form: SaunierForm) -> Result<f64> {
        match form {
            SaunierForm::Normalized => Ok(self.c1),
            SaunierForm::Printed => Err(Error::Degenerate(
                "the (x - x_moy) density is negative below x_moy and has no normalization".into(),
            )),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let g = self.gamma1;
        let f = if g.abs() <= SERIES_LIMIT {
            let mut term = 1.0;
            let mut sum = 0.0;
            let mut xp = x * x;
            for n in 0..SERIES_TERMS {
                if n > 0 {
                    term *= g / n as f64;
                    xp *= x;
                }
                sum += term * (xp / (n + 2) as f64 - xp * x / (n + 3) as f64);
            }
            sum / series(g, 2)
        } else {
            // antiderivative of t(1−t)e^{γt} is e^{γt}·A(t)
            let a = |t: f64| (t - t * t) / g + (2.0 * t - 1.0) / (g * g) - 2.0 / (g * g * g);
            if g > 0.0 {
                let e = (-g).exp();
                let j1 = ((g - 2.0) + (g + 2.0) * e) / g.powi(3);
                ((g * (x - 1.0)).exp() * a(x) - e * a(0.0)) / j1
            } else {
                let i1 = ((g - 2.0) * g.exp() + g + 2.0) / g.powi(3);
                ((g * x).exp() * a(x) - a(0.0)) / i1
            }
        };
        f.clamp(0.0, 1.0)
    }

    /// Reduced-variable quantile by bisection on the CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Interior maximum of `x(1−x)e^{γx}`.
    pub fn mode(&self) -> f64 {
        let g = self.gamma1;
        2.0 / ((g * g + 4.0).sqrt() - g + 2.0)
    }

    pub fn pdf_kt(&self, kt: f64) -> f64 {
        self.pdf(kt / self.kt_max) / self.kt_max
    }

    pub fn cdf_kt(&self, kt: f64) -> f64 {
        self.cdf(kt / self.kt_max)
    }

    /// One reduced-variable draw by rejection under the density maximum.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.mode();
        let peak = (m * (1.0 - m)).ln();
        loop {
            let x = open_unit(rng);
            let u = open_unit(rng);
            // ratio p(x)/p(m), in log space so large |γ| cannot overflow
            let log_ratio = (x * (1.0 - x)).ln() - peak + self.gamma1 * (x - m);
            if u.ln() <= log_ratio {
                return x;
            }
        }
    }
}

/// Solve γ₁ so that the mean of the law equals `kt_moy / kt_max`.
pub fn saunier_solve(kt_moy: f64, kt_max: f64) -> Result<SaunierParams> {
    if !(kt_moy > 0.0 && kt_moy < kt_max && kt_max <= 1.0) {
        return Err(Error::invalid(format!(
            "Saunier solve needs 0 < kt_moy < kt_max <= 1, got kt_moy={kt_moy}, kt_max={kt_max}"
        )));
    }
    let target = kt_moy / kt_max;
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut iterations = 0;
    while saunier_mean(lo) > target {
        lo *= 2.0;
        iterations += 1;
        if lo < -GAMMA_LIMIT || iterations > SOLVE_MAX_ITER {
            return Err(Error::Convergence(format!(
                "mean {target} is below the attainable range of the Saunier law"
            )));
        }
    }
    while saunier_mean(hi) < target {
        hi *= 2.0;
        iterations += 1;
        if hi > GAMMA_LIMIT || iterations > SOLVE_MAX_ITER {
            return Err(Error::Convergence(format!(
                "mean {target} is above the attainable range of the Saunier law"
            )));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let m = saunier_mean(mid);
        if m == target {
            lo = mid;
            hi = mid;
        } else if m < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if hi - lo < SOLVE_TOL {
            break;
        }
        if iterations > SOLVE_MAX_ITER {
            return Err(Error::Convergence(
                "Saunier gamma1 bisection did not converge".into(),
            ));
        }
    }
    let gamma1 = 0.5 * (lo + hi);
    Ok(SaunierParams {
        gamma1,
        c1: saunier_norm(gamma1),
        x_moy: saunier_mean(gamma1),
        kt_moy,
        kt_max,
    })
}

/// Default `Kt_max`: the 98th percentile of the observed clearness index.
pub fn default_kt_max(kt: &[f64]) -> Result<f64> {
    if kt.is_empty() {
        return Err(Error::NoData);
    }
    Ok(stats::quantile(kt, 0.98).min(1.0))
}

/// Fit the law to an observed clearness-index series.
pub fn saunier_fit(kt: &ClimateSeries, kt_max: Option<f64>) -> Result<SaunierParams> {
    let values = kt.present();
    if values.is_empty() {
        return Err(Error::NoData);
    }
    let kt_max = match kt_max {
        Some(v) => v,
        None => default_kt_max(&values)?,
    };
    saunier_solve(stats::mean(&values), kt_max)
}
