use std::collections::BTreeSet;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ClimateSeries, Variable};
use crate::{Error, Result};

/// Half-open bin `[lower, upper)` on one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub variable: Variable,
    pub lower: f64,
    pub upper: f64,
}

impl Predicate {
    pub fn new(variable: Variable, lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::invalid(format!(
                "empty interval [{lower}, {upper}) for {variable}"
            )));
        }
        Ok(Predicate {
            variable,
            lower,
            upper,
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value < self.upper
    }
}

/// Climatic conditions filter: months, an hour window and value bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCriteria {
    pub months: BTreeSet<u32>,
    /// Inclusive hour window; wraps past midnight when start > end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hour_range: Option<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicates: Vec<Predicate>,
}

impl Default for SelectionCriteria {
    fn default() -> Self {
        Self::all()
    }
}

impl SelectionCriteria {
    /// Every month, every hour, no predicate.
    pub fn all() -> Self {
        SelectionCriteria {
            months: (1..=12).collect(),
            hour_range: None,
            predicates: Vec::new(),
        }
    }

    pub fn months(months: impl IntoIterator<Item = u32>) -> Result<Self> {
        let c = SelectionCriteria {
            months: months.into_iter().collect(),
            ..Self::all()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_hours(mut self, start: u32, end: u32) -> Result<Self> {
        self.hour_range = Some((start, end));
        self.validate()?;
        Ok(self)
    }

    pub fn with_predicate(mut self, variable: Variable, lower: f64, upper: f64) -> Result<Self> {
        self.predicates
            .push(Predicate::new(variable, lower, upper)?);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.months.is_empty() {
            return Err(Error::invalid("criteria month set is empty"));
        }
        if let Some(m) = self.months.iter().find(|m| !(1..=12).contains(*m)) {
            return Err(Error::invalid(format!("month {m} out of 1..12")));
        }
        if let Some((a, b)) = self.hour_range {
            if a > 23 || b > 23 {
                return Err(Error::invalid(format!(
                    "hour window ({a}, {b}) out of 0..23"
                )));
            }
        }
        for p in &self.predicates {
            if !(p.lower < p.upper) {
                return Err(Error::invalid(format!("empty interval on {}", p.variable)));
            }
        }
        Ok(())
    }

    pub fn is_all_months(&self) -> bool {
        self.months.len() == 12
    }

    /// Calendar part of the filter (months and hour window).
    pub fn matches_time(&self, t: NaiveDateTime) -> bool {
        if !self.months.contains(&t.month()) {
            return false;
        }
        match self.hour_range {
            None => true,
            Some((a, b)) if a <= b => (a..=b).contains(&t.hour()),
            Some((a, b)) => t.hour() >= a || t.hour() <= b,
        }
    }

    /// Short label of the month set, used in registry keys: `all`, `m08`, `m06-m08`.
    pub fn period_label(&self) -> String {
        if self.is_all_months() {
            return "all".into();
        }
        let months: Vec<u32> = self.months.iter().copied().collect();
        let contiguous = months.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous && months.len() > 1 {
            format!("m{:02}-m{:02}", months[0], months[months.len() - 1])
        } else {
            months
                .iter()
                .map(|m| format!("m{m:02}"))
                .collect::<Vec<_>>()
                .join("+")
        }
    }

    /// Stable 16-hex-digit digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("criteria serialize");
        let hash = Sha256::digest(&canonical);
        hash[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses `8`, `6-8`, `1,2,12` or `all`.
    pub fn parse_months(spec: &str) -> Result<BTreeSet<u32>> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("all") {
            return Ok((1..=12).collect());
        }
        let mut out = BTreeSet::new();
        for part in spec.split(',') {
            let bad = || Error::invalid(format!("bad month list '{spec}'"));
            match part.split_once('-') {
                Some((a, b)) => {
                    let a: u32 = a.trim().parse().map_err(|_| bad())?;
                    let b: u32 = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => {
                    out.insert(part.trim().parse().map_err(|_| bad())?);
                }
            }
        }
        Ok(out)
    }
}

/// Sub-series whose timestamps satisfy the criteria.
///
/// Predicates are evaluated on the companion series (or on `series` itself
/// when the predicate names its variable) at the same timestamp; a missing
/// companion value fails the predicate.
pub fn select(
    series: &ClimateSeries,
    criteria: &SelectionCriteria,
    companions: &[ClimateSeries],
) -> Result<ClimateSeries> {
    criteria.validate()?;
    let lookup: Vec<&ClimateSeries> = criteria
        .predicates
        .iter()
        .map(|p| {
            if p.variable == series.variable() {
                Ok(series)
            } else {
                companions
                    .iter()
                    .find(|c| c.variable() == p.variable)
                    .ok_or(Error::MissingPredicate(p.variable))
            }
        })
        .collect::<Result<_>>()?;

    let mut keep = Vec::with_capacity(series.len());
    for &t in series.timestamps() {
        let mut ok = criteria.matches_time(t);
        if ok {
            for (p, comp) in criteria.predicates.iter().zip(&lookup) {
                match comp.value_at(t) {
                    None => return Err(Error::NotAligned(comp.variable(), t)),
                    Some(Some(v)) if p.contains(v) => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        keep.push(ok);
    }
    Ok(series.filter_positions(&keep))
}

/// Aligned regression rows: the response value and every predictor value
/// at each selected timestamp where all of them are present.
///
/// Predicates in `criteria` may refer to the response, a predictor, or a
/// series in `extra`. A predictor lacking a selected timestamp is an
/// alignment error.
pub fn select_rows(
    response: &ClimateSeries,
    predictors: &[ClimateSeries],
    criteria: &SelectionCriteria,
    extra: &[ClimateSeries],
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let companions: Vec<ClimateSeries> = predictors.iter().chain(extra).cloned().collect();
    let selected = select(response, criteria, &companions)?;
    let mut inputs = Vec::new();
    let mut observed = Vec::new();
    'rows: for (t, y) in selected.iter() {
        let Some(y) = y else { continue };
        let mut row = Vec::with_capacity(predictors.len());
        for p in predictors {
            match p.value_at(t) {
                None => return Err(Error::NotAligned(p.variable(), t)),
                Some(None) => continue 'rows,
                Some(Some(v)) => row.push(v),
            }
        }
        inputs.push(row);
        observed.push(y);
    }
    Ok((inputs, observed))
}
