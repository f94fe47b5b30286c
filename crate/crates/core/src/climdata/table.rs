use std::collections::BTreeMap;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::{Cadence, ClimateSeries, Variable};
use crate::{Error, Result};

/// Several variables sharing one time axis.
///
/// Columns iterate in [`Variable`] declaration order, which is also the
/// export column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherTable {
    pub cadence: Cadence,
    pub timestamps: Vec<NaiveDateTime>,
    pub columns: BTreeMap<Variable, Vec<Option<f64>>>,
}

impl WeatherTable {
    pub fn new(cadence: Cadence, timestamps: Vec<NaiveDateTime>) -> Self {
        WeatherTable {
            cadence,
            timestamps,
            columns: BTreeMap::new(),
        }
    }

    /// Builds a table from series sharing the same timestamps.
    pub fn from_series(series: &[ClimateSeries]) -> Result<Self> {
        let first = series.first().ok_or(Error::NoData)?;
        let mut table = WeatherTable::new(first.cadence(), first.timestamps().to_vec());
        for s in series {
            if s.timestamps() != first.timestamps() {
                return Err(Error::invalid(format!(
                    "{} is not aligned with {}",
                    s.variable(),
                    first.variable()
                )));
            }
            table.columns.insert(s.variable(), s.values().to_vec());
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn variables(&self) -> Vec<Variable> {
        self.columns.keys().copied().collect()
    }

    pub fn has(&self, v: Variable) -> bool {
        self.columns.contains_key(&v)
    }

    pub fn column(&self, v: Variable) -> Option<&[Option<f64>]> {
        self.columns.get(&v).map(Vec::as_slice)
    }

    pub fn get(&self, v: Variable, row: usize) -> Option<f64> {
        self.columns.get(&v).and_then(|c| c[row])
    }

    pub fn insert(&mut self, v: Variable, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::invalid(format!(
                "column {v} has {} rows, table has {}",
                values.len(),
                self.len()
            )));
        }
        self.columns.insert(v, values);
        Ok(())
    }

    /// Column as a validated series.
    pub fn series(&self, v: Variable) -> Result<ClimateSeries> {
        let values = self
            .columns
            .get(&v)
            .ok_or_else(|| Error::invalid(format!("table has no column {v}")))?;
        ClimateSeries::new(v, self.cadence, self.timestamps.clone(), values.clone())
    }

    /// Every column as a series.
    pub fn all_series(&self) -> Result<Vec<ClimateSeries>> {
        self.columns.keys().map(|v| self.series(*v)).collect()
    }

    /// Keeps only the listed columns (missing ones are ignored).
    pub fn retain(&mut self, keep: &[Variable]) {
        self.columns.retain(|v, _| keep.contains(v));
    }

    /// Rows where `keep` is true.
    pub fn filter_rows(&self, keep: &[bool]) -> WeatherTable {
        let pick = |col: &Vec<Option<f64>>| {
            col.iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(v, _)| *v)
                .collect::<Vec<_>>()
        };
        WeatherTable {
            cadence: self.cadence,
            timestamps: self
                .timestamps
                .iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(t, _)| *t)
                .collect(),
            columns: self.columns.iter().map(|(v, c)| (*v, pick(c))).collect(),
        }
    }
}
