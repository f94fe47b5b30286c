use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::climdata::psychro::{sky_temperature, standard_pressure, wet_bulb};
use crate::climdata::{SiteMeta, Variable, WeatherTable};
use crate::solargeo::SolarCalendar;
use crate::{Error, Result};

/// Coherence rules, in the order they are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// NaN or infinite cells become missing.
    NonFinite,
    RadiationNonNegative,
    NightRadiation,
    DiffuseBelowGlobal,
    BeamBalance,
    HumidityRange,
    WindNonNegative,
    WetBulbBelowDryBulb,
    ClearnessRange,
    /// Any other variable outside its physical range.
    OtherRange,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub rows: usize,
    /// Rows touched by at least one repair.
    pub rows_repaired: usize,
    pub repairs: BTreeMap<Rule, usize>,
}

impl CoherenceReport {
    pub fn total(&self) -> usize {
        self.repairs.values().sum()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.repairs.get(&rule).copied().unwrap_or(0)
    }

    pub fn repair_rate(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            self.rows_repaired as f64 / self.rows as f64
        }
    }
}

const SPECIFIC: [Variable; 7] = [
    Variable::GlobalRad,
    Variable::DiffuseRad,
    Variable::BeamRad,
    Variable::RelHumidity,
    Variable::WindSpeed,
    Variable::WetBulbTemp,
    Variable::ClearnessIndex,
];

struct Row<'a> {
    table: &'a mut WeatherTable,
    i: usize,
    report: &'a mut CoherenceReport,
    touched: bool,
}

impl Row<'_> {
    fn get(&self, v: Variable) -> Option<f64> {
        self.table.get(v, self.i)
    }

    fn set(&mut self, v: Variable, value: Option<f64>, rule: Rule) {
        if let Some(col) = self.table.columns.get_mut(&v) {
            col[self.i] = value;
            *self.report.repairs.entry(rule).or_insert(0) += 1;
            self.touched = true;
        }
    }

    fn clamp(&mut self, v: Variable, lo: f64, hi: f64, rule: Rule) {
        if let Some(x) = self.get(v) {
            if x < lo || x > hi {
                self.set(v, Some(x.clamp(lo, hi)), rule);
            }
        }
    }
}

/// Repairs physically incoherent cells in place and counts every repair.
///
/// Rules run in a fixed order (see [`Rule`]); running the function on its
/// own output yields no repairs. The night rule needs `site`.
pub fn enforce_coherence(table: &mut WeatherTable, site: Option<&SiteMeta>) -> CoherenceReport {
    let mut report = CoherenceReport {
        rows: table.len(),
        ..Default::default()
    };
    let mut cal = site.map(SolarCalendar::new);
    let cadence = table.cadence;
    let fallback_pressure = standard_pressure(site.map_or(0.0, |s| s.altitude));
    let variables = table.variables();

    for i in 0..table.len() {
        let t = table.timestamps[i];
        let night = cal
            .as_mut()
            .is_some_and(|c| c.extraterrestrial(t, cadence) <= 0.0);
        let mut row = Row {
            table: &mut *table,
            i,
            report: &mut report,
            touched: false,
        };

        for v in &variables {
            if row.get(*v).is_some_and(|x| !x.is_finite()) {
                row.set(*v, None, Rule::NonFinite);
            }
        }
        for v in [Variable::GlobalRad, Variable::DiffuseRad, Variable::BeamRad] {
            row.clamp(v, 0.0, f64::INFINITY, Rule::RadiationNonNegative);
        }
        if night {
            for v in [Variable::GlobalRad, Variable::DiffuseRad, Variable::BeamRad] {
                if row.get(v).is_some_and(|x| x != 0.0) {
                    row.set(v, Some(0.0), Rule::NightRadiation);
                }
            }
        }
        if let (Some(g), Some(d)) = (row.get(Variable::GlobalRad), row.get(Variable::DiffuseRad)) {
            if d > g {
                row.set(Variable::DiffuseRad, Some(g), Rule::DiffuseBelowGlobal);
            }
        }
        if let (Some(g), Some(d)) = (row.get(Variable::GlobalRad), row.get(Variable::DiffuseRad)) {
            let target = g - d;
            let off = match row.get(Variable::BeamRad) {
                Some(b) => (b - target).abs() > 1e-9 * target.abs().max(1.0),
                None => true,
            };
            if off {
                row.set(Variable::BeamRad, Some(target), Rule::BeamBalance);
            }
        }
        row.clamp(Variable::RelHumidity, 0.0, 100.0, Rule::HumidityRange);
        row.clamp(
            Variable::WindSpeed,
            0.0,
            f64::INFINITY,
            Rule::WindNonNegative,
        );
        if let (Some(db), Some(wb)) = (
            row.get(Variable::DryBulbTemp),
            row.get(Variable::WetBulbTemp),
        ) {
            if wb > db + 1e-9 {
                let p = row.get(Variable::Pressure).unwrap_or(fallback_pressure);
                let fixed = row
                    .get(Variable::RelHumidity)
                    .and_then(|rh| wet_bulb(db, rh, p).ok())
                    .unwrap_or(db);
                row.set(
                    Variable::WetBulbTemp,
                    Some(fixed.min(db)),
                    Rule::WetBulbBelowDryBulb,
                );
            }
        }
        row.clamp(Variable::ClearnessIndex, 0.0, 1.0, Rule::ClearnessRange);
        for v in variables.iter().filter(|v| !SPECIFIC.contains(v)) {
            let (lo, hi) = v.range();
            row.clamp(*v, lo, hi, Rule::OtherRange);
        }

        if row.touched {
            report.rows_repaired += 1;
        }
    }
    report
}

/// Adds the wet-bulb column and, when `sky` is set, the sky-temperature
/// column. Station pressure comes from the table or the standard
/// atmosphere; missing cloud cover counts as clear sky.
pub fn derive_variables(table: &mut WeatherTable, site: &SiteMeta, sky: bool) -> Result<()> {
    let (Some(db), Some(rh)) = (
        table.column(Variable::DryBulbTemp),
        table.column(Variable::RelHumidity),
    ) else {
        return Err(Error::invalid(
            "derived variables need dry_bulb_temp and rel_humidity",
        ));
    };
    let fallback = standard_pressure(site.altitude);
    let mut wb = Vec::with_capacity(table.len());
    let mut ts = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        match (db[i], rh[i]) {
            (Some(t), Some(h)) => {
                let h = h.clamp(0.0, 100.0);
                let p = table.get(Variable::Pressure, i).unwrap_or(fallback);
                wb.push(Some(wet_bulb(t, h, p)?));
                let n = table.get(Variable::Nebulosity, i).unwrap_or(0.0);
                ts.push(Some(sky_temperature(t, h, n)));
            }
            _ => {
                wb.push(None);
                ts.push(None);
            }
        }
    }
    table.insert(Variable::WetBulbTemp, wb)?;
    if sky {
        table.insert(Variable::SkyTemp, ts)?;
    }
    Ok(())
}
