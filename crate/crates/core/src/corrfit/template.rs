use serde::{Deserialize, Serialize};

use crate::climdata::Variable;
use crate::{Error, Result};

/// One monomial of a template: the exponent of each predictor, in order.
/// All-zero exponents are the intercept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term(pub Vec<u32>);

impl Term {
    pub fn is_intercept(&self) -> bool {
        self.0.iter().all(|p| *p == 0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(p, _)| **p > 0)
            .map(|(p, v)| v.powi(*p as i32))
            .product()
    }

    pub fn label(&self, predictors: &[Variable]) -> String {
        if self.is_intercept() {
            return "1".to_string();
        }
        self.0
            .iter()
            .zip(predictors)
            .filter(|(p, _)| **p > 0)
            .map(|(p, v)| match p {
                1 => v.name().to_string(),
                _ => format!("{}^{p}", v.name()),
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// A regression form that is linear in its coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub n_predictors: usize,
    pub terms: Vec<Term>,
}

/// Named correlations from the solar-radiation literature, mapped onto the
/// generic shapes. Only the shape is reproduced, never published
/// coefficients.
const ALIASES: &[(&str, &str, &str)] = &[
    (
        "angstrom_linear",
        "poly1",
        "clearness index = a + b * sunshine fraction",
    ),
    (
        "angstrom_black",
        "poly1",
        "clearness index = a + b * sunshine fraction",
    ),
    (
        "hay",
        "poly1",
        "sunshine fraction = a + b * clearness index",
    ),
    (
        "hay_inverse",
        "poly1",
        "clearness index = a + b * sunshine fraction",
    ),
    (
        "klein",
        "multilinear",
        "global = a + b * insolation + c * diffuse",
    ),
    (
        "page",
        "multilinear",
        "global = a + b * insolation + c * diffuse",
    ),
    (
        "gopinathan1",
        "multilinear",
        "insolation vs global and diffuse",
    ),
    ("iqbal", "poly1", "diffuse = a + b * insolation"),
    (
        "erbs",
        "poly3",
        "diffuse fraction as a cubic in clearness index",
    ),
    ("castagnoli", "poly1", "beam = a + b * clearness index"),
    (
        "barr",
        "poly2",
        "clearness index as a quadratic in nebulosity",
    ),
    ("rangarajan", "poly1", "insolation = a + b * nebulosity"),
    (
        "gopinathan2",
        "multilinear",
        "global vs insolation, clearness index, diffuse",
    ),
];

/// Published correlations with no known form: they must be supplied as
/// custom templates.
const USER_DEFINED: &[&str] = &["soler"];

impl Template {
    /// Polynomial of the given degree in a single predictor.
    pub fn poly(degree: u32) -> Self {
        Self {
            id: format!("poly{degree}"),
            n_predictors: 1,
            terms: (0..=degree).map(|d| Term(vec![d])).collect(),
        }
    }

    /// Intercept plus one linear term per predictor.
    pub fn multilinear(n_predictors: usize) -> Self {
        let mut terms = vec![Term(vec![0; n_predictors])];
        for i in 0..n_predictors {
            let mut p = vec![0; n_predictors];
            p[i] = 1;
            terms.push(Term(p));
        }
        Self {
            id: "multilinear".into(),
            n_predictors,
            terms,
        }
    }

    /// Full second-order surface: intercept, linear, squares and pairwise
    /// products.
    pub fn quadratic(n_predictors: usize) -> Self {
        let mut t = Self::multilinear(n_predictors);
        for i in 0..n_predictors {
            for j in i..n_predictors {
                let mut p = vec![0; n_predictors];
                p[i] += 1;
                p[j] += 1;
                t.terms.push(Term(p));
            }
        }
        t.id = "quadratic".into();
        t
    }

    /// User-defined template; each term lists one exponent per predictor.
    pub fn custom(id: impl Into<String>, n_predictors: usize, terms: Vec<Term>) -> Result<Self> {
        let t = Self {
            id: id.into(),
            n_predictors,
            terms,
        };
        t.validate()?;
        Ok(t)
    }

    /// Look up a built-in template or alias for `n_predictors` predictors.
    pub fn builtin(id: &str, n_predictors: usize) -> Result<Self> {
        let lower = id.to_ascii_lowercase();
        if USER_DEFINED.contains(&lower.as_str()) {
            return Err(Error::invalid(format!(
                "template '{id}' has no published form; define it as a custom template"
            )));
        }
        let (shape, alias) = match ALIASES.iter().find(|(name, _, _)| *name == lower) {
            Some((name, shape, _)) => (*shape, Some(*name)),
            None => (lower.as_str(), None),
        };
        let mut t = match shape {
            "linear" | "poly1" => Self::poly(1),
            "poly2" => Self::poly(2),
            "poly3" => Self::poly(3),
            "multilinear" => Self::multilinear(n_predictors),
            "quadratic" => Self::quadratic(n_predictors),
            _ => {
                return Err(Error::invalid(format!(
                    "unknown correlation template '{id}'"
                )))
            }
        };
        if t.n_predictors != n_predictors {
            return Err(Error::invalid(format!(
                "template '{id}' takes {} predictor(s), got {n_predictors}",
                t.n_predictors
            )));
        }
        if let Some(name) = alias {
            t.id = name.to_string();
        }
        Ok(t)
    }

    /// Names accepted by [`Template::builtin`], with a short description.
    pub fn catalog() -> Vec<(&'static str, &'static str)> {
        let mut out = vec![
            ("poly1", "a + b x"),
            ("poly2", "a + b x + c x^2"),
            ("poly3", "a + b x + c x^2 + d x^3"),
            ("multilinear", "a + sum of b_i x_i"),
            (
                "quadratic",
                "multilinear plus squares and pairwise products",
            ),
        ];
        out.extend(ALIASES.iter().map(|(name, _, desc)| (*name, *desc)));
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::invalid(format!(
                "template '{}' has no terms",
                self.id
            )));
        }
        for t in &self.terms {
            if t.0.len() != self.n_predictors {
                return Err(Error::invalid(format!(
                    "template '{}' term has {} exponents for {} predictors",
                    self.id,
                    t.0.len(),
                    self.n_predictors
                )));
            }
        }
        for (i, a) in self.terms.iter().enumerate() {
            if self.terms[..i].contains(a) {
                return Err(Error::invalid(format!(
                    "template '{}' repeats a term",
                    self.id
                )));
            }
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.terms.len()
    }

    pub fn has_intercept(&self) -> bool {
        self.terms.iter().any(Term::is_intercept)
    }

    pub fn row(&self, x: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|t| t.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve_to_shapes() {
        let t = Template::builtin("angstrom_linear", 1).unwrap();
        assert_eq!(t.id, "angstrom_linear");
        assert_eq!(t.terms, Template::poly(1).terms);
        assert_eq!(Template::builtin("klein", 2).unwrap().parameter_count(), 3);
        assert_eq!(
            Template::builtin("quadratic", 2).unwrap().parameter_count(),
            6
        );
        assert!(Template::builtin("soler", 4).is_err());
        assert!(Template::builtin("poly2", 2).is_err());
        assert!(Template::builtin("nope", 1).is_err());
    }

    #[test]
    fn labels() {
        let vars = [Variable::GlobalRad, Variable::WindSpeed];
        let t = Template::quadratic(2);
        let labels: Vec<String> = t.terms.iter().map(|t| t.label(&vars)).collect();
        assert_eq!(
            labels,
            [
                "1",
                "global_rad",
                "wind_speed",
                "global_rad^2",
                "global_rad*wind_speed",
                "wind_speed^2"
            ]
        );
    }

    #[test]
    fn custom_checks_shape() {
        assert!(Template::custom("x", 2, vec![Term(vec![1])]).is_err());
        assert!(Template::custom("x", 1, vec![Term(vec![1]), Term(vec![1])]).is_err());
        let t = Template::custom("soler", 2, vec![Term(vec![0, 0]), Term(vec![1, 1])]).unwrap();
        assert_eq!(t.row(&[2.0, 3.0]), vec![1.0, 6.0]);
    }
}
