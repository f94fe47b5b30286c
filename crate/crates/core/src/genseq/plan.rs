use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::climdata::{Cadence, SelectionCriteria, SiteMeta, Variable};
use crate::{Error, Result};

/// What to generate, where, when and under which climatic conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationPlan {
    pub site: SiteMeta,
    /// Requested output columns.
    pub variables: Vec<Variable>,
    pub start: NaiveDateTime,
    /// Number of generated steps.
    pub duration: usize,
    pub cadence: Cadence,
    #[serde(default)]
    pub criteria: SelectionCriteria,
    pub seed: u64,
    /// Registry file names forced for some variables.
    #[serde(default)]
    pub overrides: BTreeMap<Variable, String>,
    #[serde(default)]
    pub options: GenerationOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationOptions {
    /// Add the sky-temperature column even when it is not requested.
    pub sky_temperature: bool,
    /// Add Gaussian noise with the fitted residual spread to correlation
    /// and network outputs. Without it those variables come out far too
    /// smooth.
    pub residual_noise: bool,
    /// Preferred predictor of nebulosity correlations.
    pub nebulosity_driver: Variable,
    /// Share of rows allowed to need a coherence repair.
    pub max_repair_rate: f64,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions {
            sky_temperature: false,
            residual_noise: true,
            nebulosity_driver: Variable::ClearnessIndex,
            max_repair_rate: 0.2,
        }
    }
}

impl GenerationPlan {
    pub fn new(
        site: SiteMeta,
        variables: Vec<Variable>,
        start: NaiveDateTime,
        duration: usize,
        cadence: Cadence,
        criteria: SelectionCriteria,
        seed: u64,
    ) -> Self {
        GenerationPlan {
            site,
            variables,
            start,
            duration,
            cadence,
            criteria,
            seed,
            overrides: BTreeMap::new(),
            options: GenerationOptions::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: GenerationPlan = serde_json::from_str(&text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration == 0 {
            return Err(Error::invalid("plan duration must be at least one step"));
        }
        if self.variables.is_empty() {
            return Err(Error::invalid("plan lists no variables"));
        }
        if !(0.0..=1.0).contains(&self.options.max_repair_rate) {
            return Err(Error::invalid("max_repair_rate must lie in [0, 1]"));
        }
        self.site.validate()?;
        self.criteria.validate()
    }

    /// Generated timestamps: `duration` steps from `start`, skipping months
    /// outside the criteria.
    pub fn timeline(&self) -> Vec<NaiveDateTime> {
        let step = self.cadence.step();
        let mut out = Vec::with_capacity(self.duration);
        let mut t = self.start;
        while out.len() < self.duration {
            if self.criteria.months.contains(&t.month()) {
                out.push(t);
            }
            t += step;
        }
        out
    }

    /// Output columns: the requested variables plus optional extras.
    pub fn variables_with_options(&self) -> Vec<Variable> {
        let mut out = self.variables.clone();
        if self.options.sky_temperature && !out.contains(&Variable::SkyTemp) {
            out.push(Variable::SkyTemp);
        }
        out
    }

    /// Same plan with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        GenerationPlan {
            seed,
            ..self.clone()
        }
    }
}
