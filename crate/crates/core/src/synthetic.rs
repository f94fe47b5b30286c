//! A synthetic climate with known generating laws, for end-to-end checks.
//!
//! Daily values follow fixed rules: wind speed is a seasonal mean plus an
//! AR(1) anomaly, the clearness index is drawn independently from a Saunier
//! law, global irradiance is Kt times the extraterrestrial day mean, dry-bulb
//! temperature is a small tanh network of global irradiance and wind plus
//! Gaussian noise, and relative humidity falls with temperature.

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::climdata::{Cadence, SiteMeta, Variable, WeatherTable};
use crate::distfit::SaunierParams;
use crate::solargeo::SolarCalendar;
use crate::stats::{mix_seed, rng};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticWorld {
    pub site: SiteMeta,
    /// AR(1) coefficient of the standardized wind anomaly.
    pub wind_phi: f64,
    pub wind_mean: f64,
    /// Amplitude of the annual sine on the wind mean.
    pub wind_seasonal: f64,
    pub wind_std: f64,
    pub kt: SaunierParams,
    pub temp_noise: f64,
    pub rh_noise: f64,
}

impl SyntheticWorld {
    pub fn standard() -> Result<Self> {
        Ok(SyntheticWorld {
            site: SiteMeta::gillot(),
            wind_phi: 0.3,
            wind_mean: 5.0,
            wind_seasonal: 0.5,
            wind_std: 1.2,
            kt: SaunierParams::from_gamma(3.0, 0.75)?,
            temp_noise: 0.8,
            rh_noise: 3.0,
        })
    }

    /// Noise-free temperature response to daily global irradiance and wind.
    pub fn temperature(&self, global: f64, wind: f64) -> f64 {
        18.0 + 6.0 * ((global - 200.0) / 150.0).tanh() - 0.8 * (wind - self.wind_mean)
    }

    /// Noise-free humidity response to temperature.
    pub fn humidity(&self, temp: f64) -> f64 {
        55.0 + 30.0 * (-0.15 * (temp - 22.0)).tanh()
    }

    fn seasonal_wind(&self, date: NaiveDate) -> f64 {
        let doy = f64::from(date.ordinal());
        self.wind_mean + self.wind_seasonal * (2.0 * std::f64::consts::PI * doy / 365.0).sin()
    }

    /// Daily table for each `(year, month)` block, every block started from
    /// the stationary wind distribution.
    pub fn months(&self, blocks: &[(i32, u32)], seed: u64) -> Result<WeatherTable> {
        let mut timestamps: Vec<NaiveDateTime> = Vec::new();
        let mut cols: [Vec<Option<f64>>; 5] = Default::default();
        let mut cal = SolarCalendar::new(&self.site);
        let innov = (1.0 - self.wind_phi * self.wind_phi).sqrt();
        for (b, (year, month)) in blocks.iter().enumerate() {
            let mut r = rng(mix_seed(seed, b as u64));
            let mut x: f64 = StandardNormal.sample(&mut r);
            let first = NaiveDate::from_ymd_opt(*year, *month, 1)
                .ok_or_else(|| crate::Error::invalid(format!("bad month {year}-{month}")))?;
            for date in first.iter_days().take_while(|d| d.month() == *month) {
                let t = date.and_hms_opt(0, 0, 0).unwrap();
                let z: f64 = StandardNormal.sample(&mut r);
                x = self.wind_phi * x + innov * z;
                let wind = (self.seasonal_wind(date) + self.wind_std * x).max(0.0);
                let kt = self.kt.kt_max * self.kt.sample_x(&mut r);
                let global = kt * cal.extraterrestrial(t, Cadence::Daily);
                let e: f64 = StandardNormal.sample(&mut r);
                let temp = self.temperature(global, wind) + self.temp_noise * e;
                let e: f64 = StandardNormal.sample(&mut r);
                let rh = (self.humidity(temp) + self.rh_noise * e).clamp(0.0, 100.0);
                timestamps.push(t);
                for (c, v) in cols.iter_mut().zip([wind, kt, global, temp, rh]) {
                    c.push(Some(v));
                }
            }
        }
        let mut table = WeatherTable::new(Cadence::Daily, timestamps);
        let vars = [
            Variable::WindSpeed,
            Variable::ClearnessIndex,
            Variable::GlobalRad,
            Variable::DryBulbTemp,
            Variable::RelHumidity,
        ];
        for (v, c) in vars.into_iter().zip(cols) {
            table.insert(v, c)?;
        }
        Ok(table)
    }

    /// August blocks of consecutive years.
    pub fn augusts(&self, first_year: i32, years: usize, seed: u64) -> Result<WeatherTable> {
        let blocks: Vec<(i32, u32)> = (0..years as i32).map(|y| (first_year + y, 8)).collect();
        self.months(&blocks, seed)
    }

    /// CSV in the export dialect, with the site comment line.
    pub fn to_csv(&self, table: &WeatherTable) -> Result<String> {
        let site = format!("site: {}", serde_json::to_string(&self.site)?);
        Ok(crate::genseq::table_to_csv(table, &[site]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean, std_dev};

    #[test]
    fn august_blocks_have_expected_shape_and_laws() {
        let w = SyntheticWorld::standard().unwrap();
        let t = w.augusts(2001, 20, 5).unwrap();
        assert_eq!(t.len(), 20 * 31);
        assert!(t.timestamps.iter().all(|t| t.month() == 8));
        let kt: Vec<f64> = t
            .column(Variable::ClearnessIndex)
            .unwrap()
            .iter()
            .flatten()
            .copied()
            .collect();
        // Saunier mean is x_moy·kt_max; 620 draws give a standard error near 0.005
        assert!((mean(&kt) - w.kt.kt_moy).abs() < 0.02);
        let wind: Vec<f64> = t
            .column(Variable::WindSpeed)
            .unwrap()
            .iter()
            .flatten()
            .copied()
            .collect();
        assert!((std_dev(&wind) - w.wind_std).abs() < 0.15);
        assert_eq!(t, w.augusts(2001, 20, 5).unwrap());
    }
}
