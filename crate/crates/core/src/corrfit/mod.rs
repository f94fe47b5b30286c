//! Regression templates linear in their coefficients, fitted by least
//! squares on criteria-filtered data, with F and t significance tests and
//! a gridded relative-error surface for plotting.

mod surface;
mod template;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

pub use surface::{error_surface, ErrorCell, ErrorSurface, GridAxis};
pub use template::{Template, Term};

use crate::climdata::{select_rows, ClimateSeries, SelectionCriteria, Variable};
use crate::{Error, Result};

/// Relative tolerance on the QR diagonal below which a column is treated as
/// a linear combination of the preceding ones.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub r2: f64,
    pub f_statistic: f64,
    pub t_statistics: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residual_std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationModel {
    pub template: Template,
    pub response: Variable,
    pub predictors: Vec<Variable>,
    pub coefficients: Vec<f64>,
    pub criteria: SelectionCriteria,
    pub diagnostics: Diagnostics,
    /// Observed range of each predictor over the fitting data.
    pub predictor_ranges: Vec<(f64, f64)>,
    /// Fitting rows, retained for residual plots.
    #[serde(default)]
    pub inputs: Vec<Vec<f64>>,
    #[serde(default)]
    pub observed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub alpha: f64,
    pub f_p_value: f64,
    pub f_pass: bool,
    pub t_p_values: Vec<f64>,
    pub t_pass: Vec<bool>,
}

/// Fit `template` to `response` explained by `predictors`, on the rows
/// selected by `criteria`.
///
/// A row is used when the response and every predictor are present at the
/// same timestamp. Predicates in `criteria` may refer to the response, to a
/// predictor, or to any series in `extra`.
pub fn fit_correlation(
    template: &Template,
    response: &ClimateSeries,
    predictors: &[ClimateSeries],
    criteria: &SelectionCriteria,
    extra: &[ClimateSeries],
) -> Result<CorrelationModel> {
    template.validate()?;
    if predictors.len() != template.n_predictors {
        return Err(Error::invalid(format!(
            "template '{}' takes {} predictor(s), got {}",
            template.id,
            template.n_predictors,
            predictors.len()
        )));
    }
    let (inputs, observed) = select_rows(response, predictors, criteria, extra)?;
    let pred_vars: Vec<Variable> = predictors.iter().map(|p| p.variable()).collect();
    fit_rows(
        template,
        response.variable(),
        &pred_vars,
        inputs,
        observed,
        criteria.clone(),
    )
}

/// Least-squares fit on explicit rows.
pub fn fit_rows(
    template: &Template,
    response: Variable,
    predictors: &[Variable],
    inputs: Vec<Vec<f64>>,
    observed: Vec<f64>,
    criteria: SelectionCriteria,
) -> Result<CorrelationModel> {
    template.validate()?;
    let p = template.parameter_count();
    let n = observed.len();
    if inputs.len() != n || inputs.iter().any(|r| r.len() != template.n_predictors) {
        return Err(Error::invalid("input rows do not match the template"));
    }
    if n < p + 2 {
        return Err(Error::invalid(format!(
            "template '{}' needs at least {} rows after filtering, got {n}",
            template.id,
            p + 2
        )));
    }
    let x = DMatrix::from_fn(n, p, |i, j| template.terms[j].eval(&inputs[i]));
    let y = DVector::from_column_slice(&observed);

    let qr = x.clone().qr();
    let r = qr.r();
    let mut deficient = Vec::new();
    for j in 0..p {
        if r[(j, j)].abs() <= RANK_TOL * x.column(j).norm().max(f64::MIN_POSITIVE) {
            deficient.push(j);
        }
    }
    if !deficient.is_empty() {
        return Err(Error::RankDeficient(collinear_labels(
            template, predictors, &r, &deficient,
        )));
    }
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(labels(template, predictors)))?;

    let fitted = &x * &beta;
    let resid = &y - fitted;
    let rss = resid.norm_squared();
    let y_mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r2 = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let df = (n - p) as f64;
    let sigma2 = rss / df;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::RankDeficient(labels(template, predictors)))?;
    let std_errors: Vec<f64> = (0..p)
        .map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt())
        .collect();
    let t_statistics: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| {
            if *s > 0.0 {
                b / s
            } else {
                f64::INFINITY.copysign(*b)
            }
        })
        .collect();
    let p_model = model_dof(template);
    let f_statistic = if r2 >= 1.0 || rss == 0.0 {
        f64::INFINITY
    } else {
        (r2 / p_model as f64) / ((1.0 - r2) / df)
    };

    let predictor_ranges = (0..template.n_predictors)
        .map(|k| {
            inputs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[k]), hi.max(r[k]))
                })
        })
        .collect();

    Ok(CorrelationModel {
        template: template.clone(),
        response,
        predictors: predictors.to_vec(),
        coefficients: beta.iter().copied().collect(),
        criteria,
        diagnostics: Diagnostics {
            r2,
            f_statistic,
            t_statistics,
            std_errors,
            residual_std: sigma2.sqrt(),
            n,
        },
        predictor_ranges,
        inputs,
        observed,
    })
}

/// Regression degrees of freedom: coefficients other than the intercept.
fn model_dof(template: &Template) -> usize {
    (template.parameter_count() - usize::from(template.has_intercept())).max(1)
}

fn labels(template: &Template, predictors: &[Variable]) -> Vec<String> {
    template.terms.iter().map(|t| t.label(predictors)).collect()
}

/// Each deficient column together with the earlier columns it is a
/// combination of.
fn collinear_labels(
    template: &Template,
    predictors: &[Variable],
    r: &DMatrix<f64>,
    deficient: &[usize],
) -> Vec<String> {
    let names = labels(template, predictors);
    let mut involved = vec![false; names.len()];
    for &j in deficient {
        involved[j] = true;
        let independent: Vec<usize> = (0..j).filter(|i| !deficient.contains(i)).collect();
        let k = independent.len();
        if k == 0 {
            continue;
        }
        let sub = DMatrix::from_fn(k, k, |a, b| r[(independent[a], independent[b])]);
        let rhs = DVector::from_fn(k, |a, _| r[(independent[a], j)]);
        if let Some(coef) = sub.solve_upper_triangular(&rhs) {
            let scale = coef.amax().max(1.0);
            for (a, c) in coef.iter().enumerate() {
                if c.abs() > 1e-8 * scale {
                    involved[independent[a]] = true;
                }
            }
        }
    }
    names
        .into_iter()
        .zip(involved)
        .filter_map(|(n, keep)| keep.then_some(n))
        .collect()
}

impl CorrelationModel {
    /// Response value at `x`, one entry per predictor.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.predictors.len() {
            return Err(Error::invalid(format!(
                "expected {} predictor value(s), got {}",
                self.predictors.len(),
                x.len()
            )));
        }
        Ok(self
            .template
            .terms
            .iter()
            .zip(&self.coefficients)
            .map(|(t, c)| c * t.eval(x))
            .sum())
    }

    /// Like [`evaluate`](Self::evaluate) but refuses inputs outside the
    /// predictor ranges seen during fitting.
    pub fn evaluate_guarded(&self, x: &[f64]) -> Result<f64> {
        for ((v, (lo, hi)), var) in x.iter().zip(&self.predictor_ranges).zip(&self.predictors) {
            if v < lo || v > hi {
                return Err(Error::invalid(format!(
                    "{var} = {v} is outside the fitted range [{lo}, {hi}]"
                )));
            }
        }
        self.evaluate(x)
    }

    pub fn term_labels(&self) -> Vec<String> {
        labels(&self.template, &self.predictors)
    }

    /// F test on the regression and t test on each coefficient.
    pub fn significance(&self, alpha: f64) -> Result<Significance> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        let d = &self.diagnostics;
        let p = self.coefficients.len();
        if d.n <= p {
            return Err(Error::invalid(
                "significance needs more rows than coefficients",
            ));
        }
        let df = (d.n - p) as f64;
        let f_p_value = if d.f_statistic.is_infinite() {
            0.0
        } else {
            let f = FisherSnedecor::new(model_dof(&self.template) as f64, df)
                .map_err(|e| Error::invalid(e.to_string()))?;
            f.sf(d.f_statistic)
        };
        let t = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::invalid(e.to_string()))?;
        let t_p_values: Vec<f64> = d
            .t_statistics
            .iter()
            .map(|s| {
                if s.is_infinite() {
                    0.0
                } else {
                    2.0 * t.sf(s.abs())
                }
            })
            .collect();
        Ok(Significance {
            alpha,
            f_p_value,
            f_pass: f_p_value < alpha,
            t_pass: t_p_values.iter().map(|p| *p < alpha).collect(),
            t_p_values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn gauss(rng: &mut impl rand::Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    fn fit1(template: &Template, x: &[f64], y: &[f64]) -> Result<CorrelationModel> {
        fit_rows(
            template,
            Variable::DryBulbTemp,
            &[Variable::WindSpeed],
            x.iter().map(|v| vec![*v]).collect(),
            y.to_vec(),
            SelectionCriteria::all(),
        )
    }

    #[test]
    fn exact_line() {
        let m = fit1(
            &Template::poly(1),
            &[0.0, 1.0, 2.0, 3.0],
            &[1.0, 3.0, 5.0, 7.0],
        )
        .unwrap();
        assert!((m.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((m.coefficients[1] - 2.0).abs() < 1e-12);
        assert_eq!(m.diagnostics.r2, 1.0);
        assert!(m.diagnostics.f_statistic.is_infinite());
        assert!(m.significance(0.05).unwrap().f_pass);
        assert!((m.evaluate(&[0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((m.evaluate(&[3.0]).unwrap() - 7.0).abs() < 1e-12);
        assert!(m.evaluate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn too_few_rows() {
        assert!(fit1(&Template::poly(1), &[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).is_err());
    }

    #[test]
    fn poly2_interpolates() {
        // y = 1 − x + 2x² through five points: residuals vanish
        let xs = [-1.0, 0.0, 0.5, 1.5, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - x + 2.0 * x * x).collect();
        let m = fit1(&Template::poly(2), &xs, &ys).unwrap();
        for (c, e) in m.coefficients.iter().zip([1.0, -1.0, 2.0]) {
            assert!((c - e).abs() < 1e-10);
        }
        assert!(m.diagnostics.residual_std < 1e-10);
    }

    #[test]
    fn hand_computed_slope_t() {
        // x̄ = 3, Sxx = 10, Sxy = 6: b = 0.6, a = 2.2, RSS = 2.4, σ² = 0.8,
        // se(b) = √0.08, t = 0.6/√0.08 = 3/√2
        let m = fit1(
            &Template::poly(1),
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[2.0, 4.0, 5.0, 4.0, 5.0],
        )
        .unwrap();
        assert!((m.coefficients[0] - 2.2).abs() < 1e-12);
        assert!((m.coefficients[1] - 0.6).abs() < 1e-12);
        assert!((m.diagnostics.t_statistics[1] - 3.0 / 2f64.sqrt()).abs() < 1e-6);
        assert!((m.diagnostics.residual_std - 0.8f64.sqrt()).abs() < 1e-12);
        // r² = Sxy²/(Sxx·Syy) = 36/(10·6)
        assert!((m.diagnostics.r2 - 0.6).abs() < 1e-12);
        // F = t² for one predictor
        assert!((m.diagnostics.f_statistic - 4.5).abs() < 1e-9);
    }

    #[test]
    fn collinear_predictor_is_named() {
        let x1: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let x2: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64).collect();
        let inputs: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![x1[i], x2[i], 2.0 * x1[i] - x2[i]])
            .collect();
        let y: Vec<f64> = (0..20).map(|i| x1[i] + 0.3 * x2[i]).collect();
        let vars = [
            Variable::GlobalRad,
            Variable::WindSpeed,
            Variable::DiffuseRad,
        ];
        match fit_rows(
            &Template::multilinear(3),
            Variable::DryBulbTemp,
            &vars,
            inputs,
            y,
            SelectionCriteria::all(),
        ) {
            Err(Error::RankDeficient(names)) => {
                assert_eq!(names, ["global_rad", "wind_speed", "diffuse_rad"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pure_noise_rarely_significant() {
        let mut not_significant = 0;
        for seed in 0..100 {
            let mut rng = stats::rng(seed);
            let x: Vec<f64> = (0..100).map(|_| gauss(&mut rng)).collect();
            let y: Vec<f64> = (0..100).map(|_| gauss(&mut rng)).collect();
            let m = fit1(&Template::poly(1), &x, &y).unwrap();
            if !m.significance(0.05).unwrap().f_pass {
                not_significant += 1;
            }
        }
        assert!(not_significant >= 90, "{not_significant}");
    }

    #[test]
    fn angstrom_from_series_with_criteria() {
        use crate::climdata::Cadence;
        use chrono::NaiveDate;
        let start = NaiveDate::from_ymd_opt(2003, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let s: Vec<f64> = (0..365).map(|i| ((i * 37) % 100) as f64 / 100.0).collect();
        let kt: Vec<f64> = s.iter().map(|v| 0.25 + 0.5 * v).collect();
        let s = ClimateSeries::from_values(Variable::InsolationHours, Cadence::Daily, start, &s)
            .unwrap();
        let kt = ClimateSeries::from_values(Variable::ClearnessIndex, Cadence::Daily, start, &kt)
            .unwrap();
        let t = Template::builtin("angstrom_linear", 1).unwrap();
        let m =
            fit_correlation(&t, &kt, &[s], &SelectionCriteria::months([8]).unwrap(), &[]).unwrap();
        assert_eq!(m.diagnostics.n, 31);
        assert!((m.coefficients[0] - 0.25).abs() < 1e-12);
        assert!((m.coefficients[1] - 0.5).abs() < 1e-12);
        assert!(m.evaluate_guarded(&[1.5]).is_err());
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_design(seed in 0u64..500) {
            let mut rng = stats::rng(seed);
            let inputs: Vec<Vec<f64>> = (0..40)
                .map(|_| vec![gauss(&mut rng), 3.0 * gauss(&mut rng) + 10.0])
                .collect();
            let y: Vec<f64> = inputs.iter().map(|r| {
                1.0 + r[0] - 0.2 * r[1] * r[1] + gauss(&mut rng)
            }).collect();
            let t = Template::quadratic(2);
            let m = fit_rows(&t, Variable::DryBulbTemp, &[Variable::GlobalRad, Variable::WindSpeed], inputs.clone(), y.clone(), SelectionCriteria::all()).unwrap();
            let resid: Vec<f64> = inputs.iter().zip(&y).map(|(r, y)| y - m.evaluate(r).unwrap()).collect();
            let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
            for term in &t.terms {
                let col: Vec<f64> = inputs.iter().map(|r| term.eval(r)).collect();
                let cnorm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() < 1e-8 * cnorm * rnorm.max(1.0));
            }
            prop_assert!((0.0..=1.0).contains(&m.diagnostics.r2));
        }

        #[test]
        fn r2_invariant_under_rescaling(scale in 0.01f64..100.0, shift in -50.0f64..50.0, seed in 0u64..100) {
            let mut rng = stats::rng(seed);
            let x: Vec<f64> = (0..30).map(|_| gauss(&mut rng)).collect();
            let y: Vec<f64> = x.iter().map(|v| 2.0 * v + gauss(&mut rng)).collect();
            let a = fit1(&Template::poly(1), &x, &y).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
            let b = fit1(&Template::poly(1), &xs, &y).unwrap();
            prop_assert!((a.diagnostics.r2 - b.diagnostics.r2).abs() < 1e-9);
            prop_assert!((a.coefficients[1] / scale - b.coefficients[1]).abs() < 1e-8 * (1.0 + a.coefficients[1].abs()));
        }
    }
}
