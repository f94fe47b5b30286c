use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::climdata::{Cadence, ClimateSeries};
use crate::{stats, Error, Result};

/// Half-width, in days, of the day-of-year window.
pub const DAY_WINDOW: i64 = 15;

/// How a series is made stationary before ARMA fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardization {
    /// Subtract the overall mean only.
    Raw,
    /// Mean and std per hour of the day.
    HourOfDay,
    /// Mean and std over a ±15 day window around each day of the year.
    DayOfYear,
}

impl Standardization {
    pub fn default_for(cadence: Cadence) -> Self {
        match cadence {
            Cadence::Hourly => Standardization::HourOfDay,
            Cadence::Daily => Standardization::DayOfYear,
        }
    }
}

/// Per-slot mean and std used to standardize and to restore a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deseasonal {
    pub kind: Standardization,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

fn slot_count(kind: Standardization) -> usize {
    match kind {
        Standardization::Raw => 1,
        Standardization::HourOfDay => 24,
        Standardization::DayOfYear => 366,
    }
}

impl Deseasonal {
    /// A single slot with the given mean and std.
    pub fn flat(mean: f64, std: f64) -> Self {
        Self {
            kind: Standardization::Raw,
            means: vec![mean],
            stds: vec![std],
        }
    }

    pub fn slot(&self, t: NaiveDateTime) -> usize {
        match self.kind {
            Standardization::Raw => 0,
            Standardization::HourOfDay => t.hour() as usize,
            Standardization::DayOfYear => t.ordinal0() as usize,
        }
    }

    /// Estimate the profile from the present values of `series`. Slots with
    /// fewer than two values fall back to the overall mean and std; a
    /// vanishing std is replaced by 1.
    pub fn fit(series: &ClimateSeries, kind: Standardization) -> Result<Self> {
        let values = series.present();
        if values.len() < 2 {
            return Err(Error::NoData);
        }
        let overall_mean = stats::mean(&values);
        let overall_std = stats::std_dev(&values);
        if kind == Standardization::Raw {
            return Ok(Self::flat(overall_mean, 1.0));
        }
        let n = slot_count(kind);
        let mut sum = vec![0.0; n];
        let mut sum2 = vec![0.0; n];
        let mut count = vec![0usize; n];
        let probe = Self {
            kind,
            means: vec![],
            stds: vec![],
        };
        for (t, v) in series.iter() {
            if let Some(v) = v {
                let s = probe.slot(t);
                sum[s] += v;
                sum2[s] += v * v;
                count[s] += 1;
            }
        }
        if kind == Standardization::DayOfYear {
            let (mut ws, mut ws2, mut wc) = (vec![0.0; n], vec![0.0; n], vec![0usize; n]);
            for d in 0..n as i64 {
                for off in -DAY_WINDOW..=DAY_WINDOW {
                    let j = (d + off).rem_euclid(n as i64) as usize;
                    ws[d as usize] += sum[j];
                    ws2[d as usize] += sum2[j];
                    wc[d as usize] += count[j];
                }
            }
            sum = ws;
            sum2 = ws2;
            count = wc;
        }
        let fallback_std = if overall_std > 1e-12 {
            overall_std
        } else {
            1.0
        };
        let mut means = Vec::with_capacity(n);
        let mut stds = Vec::with_capacity(n);
        for s in 0..n {
            if count[s] < 2 {
                means.push(overall_mean);
                stds.push(fallback_std);
                continue;
            }
            let c = count[s] as f64;
            let m = sum[s] / c;
            let var = ((sum2[s] - c * m * m) / (c - 1.0)).max(0.0);
            means.push(m);
            stds.push(if var.sqrt() > 1e-12 * m.abs().max(1.0) {
                var.sqrt()
            } else {
                1.0
            });
        }
        Ok(Self { kind, means, stds })
    }

    pub fn standardize(&self, t: NaiveDateTime, v: f64) -> f64 {
        let s = self.slot(t);
        (v - self.means[s]) / self.stds[s]
    }

    pub fn restore(&self, t: NaiveDateTime, z: f64) -> f64 {
        let s = self.slot(t);
        self.means[s] + self.stds[s] * z
    }

    /// Standardized values with missing entries set to 0 (the slot mean).
    pub fn standardize_series(&self, series: &ClimateSeries) -> Vec<f64> {
        series
            .iter()
            .map(|(t, v)| v.map_or(0.0, |v| self.standardize(t, v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::climdata::Variable;
    use chrono::NaiveDate;

    #[test]
    fn hourly_profile_removes_diurnal_cycle() {
        let start = NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let v: Vec<f64> = (0..24 * 10)
            .map(|i| 3.0 + (i % 24) as f64 * 0.1 + if (i / 24) % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let s =
            ClimateSeries::from_values(Variable::WindSpeed, Cadence::Hourly, start, &v).unwrap();
        let d = Deseasonal::fit(&s, Standardization::HourOfDay).unwrap();
        assert!((d.means[5] - 3.5).abs() < 1e-12);
        let z = d.standardize_series(&s);
        for (i, (t, v)) in s.iter().enumerate() {
            assert!((d.restore(t, z[i]) - v.unwrap()).abs() < 1e-12);
        }
        let m: f64 = z.iter().sum::<f64>() / z.len() as f64;
        assert!(m.abs() < 1e-12);
    }

    #[test]
    fn raw_keeps_units() {
        let start = NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let s = ClimateSeries::from_values(
            Variable::WindSpeed,
            Cadence::Daily,
            start,
            &[1.0, 2.0, 6.0],
        )
        .unwrap();
        let d = Deseasonal::fit(&s, Standardization::Raw).unwrap();
        assert_eq!(d.means, vec![3.0]);
        assert_eq!(d.stds, vec![1.0]);
    }

    #[test]
    fn empty_slots_fall_back() {
        let start = NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let v: Vec<f64> = (0..31).map(|i| i as f64).collect();
        let s = ClimateSeries::from_values(Variable::WindSpeed, Cadence::Daily, start, &v).unwrap();
        let d = Deseasonal::fit(&s, Standardization::DayOfYear).unwrap();
        // January has no data within 15 days
        assert!((d.means[10] - 15.0).abs() < 1e-12);
        // Aug 16 (ordinal0 227) sees the whole month
        assert!((d.means[227] - 15.0).abs() < 1e-12);
        // Aug 1 sees Aug 1..16
        assert!((d.means[212] - 7.5).abs() < 1e-12);
    }
}
