use std::path::PathBuf;

use crate::climdata::Variable;

/// Errors raised by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no data")]
    NoData,

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("row {row}: timestamps are not strictly increasing")]
    NonMonotone { row: usize },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("predicate variable {0} is absent from the companion series")]
    MissingPredicate(Variable),

    #[error("companion series {0} has no value at {1}")]
    NotAligned(Variable, chrono::NaiveDateTime),

    #[error("rank-deficient design: collinear columns {0:?}")]
    RankDeficient(Vec<String>),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("levenberg-marquardt stalled: damped normal matrix singular at lambda {0:e}")]
    Stalled(f64),

    #[error("model is not stationary")]
    NonStationary,

    #[error("no model in the registry for: {}", format_unresolved(.0))]
    Unresolved(Vec<Unresolved>),

    #[error(
        "models inconsistent with criteria: {rate:.1}% of rows needed repair (limit {limit:.1}%)"
    )]
    Inconsistent { rate: f64, limit: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One variable the generator could not find a model for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unresolved {
    pub variable: Variable,
    pub period: String,
    /// Command line that would create a suitable model.
    pub suggestion: String,
}

fn format_unresolved(items: &[Unresolved]) -> String {
    items
        .iter()
        .map(|u| format!("{} ({}), try `{}`", u.variable, u.period, u.suggestion))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
