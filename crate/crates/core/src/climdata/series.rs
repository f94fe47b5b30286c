use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::Variable;
use crate::{Error, Result};

/// Sampling step of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cadence {
    Hourly,
    Daily,
}

impl Cadence {
    pub fn step(self) -> Duration {
        match self {
            Cadence::Hourly => Duration::hours(1),
            Cadence::Daily => Duration::days(1),
        }
    }

    /// Hours represented by one observation.
    pub fn hours(self) -> f64 {
        match self {
            Cadence::Hourly => 1.0,
            Cadence::Daily => 24.0,
        }
    }
}

/// Station description needed for solar geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteMeta {
    pub name: String,
    /// Degrees, north positive.
    pub latitude: f64,
    /// Degrees, east positive.
    pub longitude: f64,
    /// Meters above sea level.
    pub altitude: f64,
    /// Offset of local standard time from UTC, hours.
    pub utc_offset: f64,
}

impl SiteMeta {
    pub fn new(
        name: impl Into<String>,
        latitude: f64,
        longitude: f64,
        altitude: f64,
        utc_offset: f64,
    ) -> Result<Self> {
        let site = SiteMeta {
            name: name.into(),
            latitude,
            longitude,
            altitude,
            utc_offset,
        };
        site.validate()?;
        Ok(site)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(Error::invalid(format!(
                "latitude {} out of [-90, 90]",
                self.latitude
            )));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(Error::invalid(format!(
                "longitude {} out of [-180, 180]",
                self.longitude
            )));
        }
        if !(-12.0..=14.0).contains(&self.utc_offset) {
            return Err(Error::invalid(format!(
                "utc offset {} out of [-12, 14]",
                self.utc_offset
            )));
        }
        if !self.altitude.is_finite() {
            return Err(Error::invalid("altitude must be finite"));
        }
        Ok(())
    }

    /// Gillot, Reunion Island: the humid tropical reference site.
    pub fn gillot() -> Self {
        SiteMeta {
            name: "Gillot".into(),
            latitude: -20.89,
            longitude: 55.53,
            altitude: 8.0,
            utc_offset: 4.0,
        }
    }
}

/// One variable sampled at an hourly or daily cadence.
///
/// Timestamps are local standard time and strictly increasing. Gaps are
/// allowed (criteria selection produces them); an hourly timestamp labels
/// the hour starting at that instant. Missing observations are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimateSeries {
    variable: Variable,
    cadence: Cadence,
    timestamps: Vec<NaiveDateTime>,
    values: Vec<Option<f64>>,
}

impl ClimateSeries {
    pub fn new(
        variable: Variable,
        cadence: Cadence,
        timestamps: Vec<NaiveDateTime>,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotone { row: i + 2 });
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find_map(|(i, v)| v.filter(|x| !variable.admits(*x)).map(|x| (i, x)))
        {
            return Err(Error::invalid(format!(
                "{variable} value {v} at position {i} outside {:?}",
                variable.range()
            )));
        }
        Ok(ClimateSeries {
            variable,
            cadence,
            timestamps,
            values,
        })
    }

    /// Regularly spaced series starting at `start`.
    pub fn regular(
        variable: Variable,
        cadence: Cadence,
        start: NaiveDateTime,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        let timestamps = (0..values.len())
            .map(|i| start + cadence.step() * i as i32)
            .collect();
        Self::new(variable, cadence, timestamps, values)
    }

    /// Regular series with every value present.
    pub fn from_values(
        variable: Variable,
        cadence: Cadence,
        start: NaiveDateTime,
        values: &[f64],
    ) -> Result<Self> {
        Self::regular(
            variable,
            cadence,
            start,
            values.iter().map(|v| Some(*v)).collect(),
        )
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn cadence(&self) -> Cadence {
        self.cadence
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Non-missing values in time order.
    pub fn present(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDateTime, Option<f64>)> + '_ {
        self.timestamps
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// `None` if the timestamp is not part of the series, `Some(value)` otherwise.
    pub fn value_at(&self, t: NaiveDateTime) -> Option<Option<f64>> {
        self.timestamps
            .binary_search(&t)
            .ok()
            .map(|i| self.values[i])
    }

    /// Sub-series of the positions where `keep` is true.
    pub fn filter_positions(&self, keep: &[bool]) -> ClimateSeries {
        let (timestamps, values) = self
            .iter()
            .zip(keep)
            .filter(|(_, k)| **k)
            .map(|(tv, _)| tv)
            .unzip();
        ClimateSeries {
            variable: self.variable,
            cadence: self.cadence,
            timestamps,
            values,
        }
    }

    /// Same timestamps and cadence, new values for `variable`.
    pub fn with_values(&self, variable: Variable, values: Vec<Option<f64>>) -> Result<Self> {
        Self::new(variable, self.cadence, self.timestamps.clone(), values)
    }

    /// Missing values replaced by `fill`.
    pub fn filled(&self, fill: f64) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(fill)).collect()
    }

    pub(crate) fn from_parts_unchecked(
        variable: Variable,
        cadence: Cadence,
        timestamps: Vec<NaiveDateTime>,
        values: Vec<Option<f64>>,
    ) -> Self {
        ClimateSeries {
            variable,
            cadence,
            timestamps,
            values,
        }
    }
}
