use std::fmt;
use std::str::FromStr;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::arma::ArmaModel;
use crate::climdata::{Cadence, SelectionCriteria, Variable};
use crate::corrfit::CorrelationModel;
use crate::distfit::{GaussianParams, SaunierParams, WeibullParams};
use crate::neuralfit::NeuralModel;
use crate::{Error, Result};

/// Family of a stored model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Weibull,
    Saunier,
    Gaussian,
    Arma,
    Correlation,
    Neural,
    /// Reserved for the Liu-Jordan clearness-index law; no fit or sampler
    /// exists for it.
    LiuJordan,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Weibull => "weibull",
            ModelKind::Saunier => "saunier",
            ModelKind::Gaussian => "gaussian",
            ModelKind::Arma => "arma",
            ModelKind::Correlation => "correlation",
            ModelKind::Neural => "neural",
            ModelKind::LiuJordan => "liu_jordan",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ModelKind::Weibull,
            ModelKind::Saunier,
            ModelKind::Gaussian,
            ModelKind::Arma,
            ModelKind::Correlation,
            ModelKind::Neural,
            ModelKind::LiuJordan,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown model kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum FittedModel {
    Weibull(WeibullParams),
    Saunier(SaunierParams),
    Gaussian(GaussianParams),
    Arma(ArmaModel),
    Correlation(CorrelationModel),
    Neural(NeuralModel),
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Weibull(_) => ModelKind::Weibull,
            FittedModel::Saunier(_) => ModelKind::Saunier,
            FittedModel::Gaussian(_) => ModelKind::Gaussian,
            FittedModel::Arma(_) => ModelKind::Arma,
            FittedModel::Correlation(_) => ModelKind::Correlation,
            FittedModel::Neural(_) => ModelKind::Neural,
        }
    }

    /// Variables the model needs as inputs during generation.
    pub fn inputs(&self) -> Vec<Variable> {
        match self {
            FittedModel::Correlation(m) => m.predictors.clone(),
            FittedModel::Neural(m) => m.inputs.clone(),
            _ => Vec::new(),
        }
    }
}

/// Registry identity of a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegistryKey {
    pub variable: Variable,
    /// Month label of the criteria, such as `m08` or `all`.
    pub period: String,
    /// Digest of the full selection criteria.
    pub digest: String,
    pub kind: ModelKind,
}

impl RegistryKey {
    pub fn new(variable: Variable, criteria: &SelectionCriteria, kind: ModelKind) -> Self {
        Self {
            variable,
            period: criteria.period_label(),
            digest: criteria.digest(),
            kind,
        }
    }

    pub fn file_name(&self) -> String {
        format!(
            "{}.{}.{}.{}.json",
            self.variable, self.period, self.kind, self.digest
        )
    }

    /// Inverse of [`file_name`](Self::file_name).
    pub fn parse_file_name(name: &str) -> Result<Self> {
        let stem = name.strip_suffix(".json").unwrap_or(name);
        let parts: Vec<&str> = stem.split('.').collect();
        let [variable, period, kind, digest] = parts[..] else {
            return Err(Error::invalid(format!(
                "'{name}' is not a registry file name"
            )));
        };
        Ok(Self {
            variable: variable.parse()?,
            period: period.to_string(),
            digest: digest.to_string(),
            kind: kind.parse()?,
        })
    }
}

impl fmt::Display for RegistryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// UTC time of the fit.
    pub fitted_at: NaiveDateTime,
    pub data_start: Option<NaiveDateTime>,
    pub data_end: Option<NaiveDateTime>,
    pub n: usize,
    #[serde(default)]
    pub diagnostics: serde_json::Value,
    pub software_version: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// One stored model with the conditions it was fit under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub key: RegistryKey,
    pub cadence: Cadence,
    pub criteria: SelectionCriteria,
    pub model: FittedModel,
    pub provenance: Provenance,
}

impl RegistryEntry {
    pub fn new(
        variable: Variable,
        cadence: Cadence,
        criteria: SelectionCriteria,
        model: FittedModel,
        provenance: Provenance,
    ) -> Self {
        let key = RegistryKey::new(variable, &criteria, model.kind());
        Self {
            key,
            cadence,
            criteria,
            model,
            provenance,
        }
    }
}
