//! Solar geometry for clearness indices and sunshine fractions.
//!
//! Standard solar-engineering relations (Duffie & Beckman):
//!
//! ```text
//! E0 = 1 + 0.033 cos(360 n / 365)                 eccentricity correction
//! δ  = 23.45 sin(360 (284 + n) / 365)             declination, degrees
//! ωs = acos(−tan φ tan δ)                         sunset hour angle
//! S0 = 2 ωs / 15                                  day length, hours
//! H0 = (24/π) Gsc E0 (cos φ cos δ sin ωs + ωs sin φ sin δ)   Wh/m²
//! ```
//!
//! with `Gsc = 1367 W/m²`. Hourly extraterrestrial irradiance integrates the
//! same expression over each local clock hour after converting to solar
//! time with the longitude correction and the Spencer equation of time, so
//! the 24 hourly values sum exactly to `H0`. Beyond the polar circles the
//! `acos` argument is clamped, giving polar day or night.

use std::collections::HashMap;
use std::f64::consts::PI;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::climdata::{Cadence, ClimateSeries, SiteMeta, Variable};
use crate::{Error, Result};

/// Solar constant, W/m².
pub const SOLAR_CONSTANT: f64 = 1367.0;

/// Daily solar geometry at a site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolarDay {
    pub day_of_year: u32,
    /// Degrees.
    pub declination: f64,
    /// Degrees.
    pub sunset_hour_angle: f64,
    /// Astronomical day length S0, hours.
    pub day_length: f64,
    /// Daily extraterrestrial irradiation on a horizontal plane, Wh/m².
    pub extraterrestrial_daily: f64,
    /// Mean extraterrestrial irradiance over each local clock hour, W/m².
    pub hourly: [f64; 24],
    eccentricity: f64,
    /// Solar time minus local clock time, hours.
    solar_offset: f64,
}

fn day_angle(n: u32) -> f64 {
    2.0 * PI * f64::from(n) / 365.0
}

/// Cooper declination, degrees.
pub fn declination(day_of_year: u32) -> f64 {
    23.45 * (2.0 * PI * (284.0 + f64::from(day_of_year)) / 365.0).sin()
}

/// Spencer equation of time, minutes.
pub fn equation_of_time(day_of_year: u32) -> f64 {
    let b = 2.0 * PI * (f64::from(day_of_year) - 1.0) / 365.0;
    229.2
        * (0.000075 + 0.001868 * b.cos()
            - 0.032077 * b.sin()
            - 0.014615 * (2.0 * b).cos()
            - 0.04089 * (2.0 * b).sin())
}

pub fn solar_day(site: &SiteMeta, date: NaiveDate) -> SolarDay {
    let n = date.ordinal();
    let phi = site.latitude.to_radians();
    let decl = declination(n);
    let d = decl.to_radians();
    let e0 = 1.0 + 0.033 * day_angle(n).cos();
    let ws = (-phi.tan() * d.tan()).clamp(-1.0, 1.0).acos();
    let a = phi.cos() * d.cos();
    let b = phi.sin() * d.sin();
    let h0 = 24.0 / PI * SOLAR_CONSTANT * e0 * (a * ws.sin() + ws * b);

    let solar_offset =
        (4.0 * (site.longitude - 15.0 * site.utc_offset) + equation_of_time(n)) / 60.0;
    let mut hourly = [0.0; 24];
    for (h, slot) in hourly.iter_mut().enumerate() {
        let start = (h as f64 + solar_offset - 12.0) * 15.0_f64.to_radians();
        let end = start + 15.0_f64.to_radians();
        let mut energy = 0.0;
        // the clock hour may wrap into the neighbouring solar day
        for k in [-1.0, 0.0, 1.0] {
            let lo = start.max(-ws + 2.0 * PI * k);
            let hi = end.min(ws + 2.0 * PI * k);
            if hi > lo {
                let (lo, hi) = (lo - 2.0 * PI * k, hi - 2.0 * PI * k);
                energy += a * (hi.sin() - lo.sin()) + (hi - lo) * b;
            }
        }
        *slot = (12.0 / PI * SOLAR_CONSTANT * e0 * energy).max(0.0);
    }

    SolarDay {
        day_of_year: n,
        declination: decl,
        sunset_hour_angle: ws.to_degrees(),
        day_length: 2.0 * ws.to_degrees() / 15.0,
        extraterrestrial_daily: h0.max(0.0),
        hourly,
        eccentricity: e0,
        solar_offset,
    }
}

impl SolarDay {
    /// Hour angle (degrees) at a local clock time given in fractional hours.
    pub fn hour_angle(&self, clock_hours: f64) -> f64 {
        (clock_hours + self.solar_offset - 12.0) * 15.0
    }

    /// Instantaneous extraterrestrial irradiance on a horizontal plane, W/m².
    pub fn irradiance_at(&self, site: &SiteMeta, clock_hours: f64) -> f64 {
        SOLAR_CONSTANT * self.eccentricity * self.cos_zenith(site, clock_hours).max(0.0)
    }

    fn cos_zenith(&self, site: &SiteMeta, clock_hours: f64) -> f64 {
        let phi = site.latitude.to_radians();
        let d = self.declination.to_radians();
        let w = self.hour_angle(clock_hours).to_radians();
        phi.cos() * d.cos() * w.cos() + phi.sin() * d.sin()
    }

    /// Solar elevation (degrees) at a local clock time.
    pub fn elevation(&self, site: &SiteMeta, clock_hours: f64) -> f64 {
        self.cos_zenith(site, clock_hours)
            .clamp(-1.0, 1.0)
            .asin()
            .to_degrees()
    }
}

fn clock_hours(t: NaiveDateTime) -> f64 {
    f64::from(t.hour()) + f64::from(t.minute()) / 60.0 + f64::from(t.second()) / 3600.0
}

/// Memoized [`solar_day`] lookups for a run of timestamps.
pub struct SolarCalendar<'a> {
    site: &'a SiteMeta,
    days: HashMap<NaiveDate, SolarDay>,
}

impl<'a> SolarCalendar<'a> {
    pub fn new(site: &'a SiteMeta) -> Self {
        SolarCalendar {
            site,
            days: HashMap::new(),
        }
    }

    pub fn day(&mut self, date: NaiveDate) -> &SolarDay {
        let site = self.site;
        self.days
            .entry(date)
            .or_insert_with(|| solar_day(site, date))
    }

    /// Extraterrestrial irradiance matching one observation: the hour mean
    /// for hourly data, the day mean (H0 / 24) for daily data.
    pub fn extraterrestrial(&mut self, t: NaiveDateTime, cadence: Cadence) -> f64 {
        let day = self.day(t.date());
        match cadence {
            Cadence::Hourly => day.hourly[t.hour() as usize],
            Cadence::Daily => day.extraterrestrial_daily / 24.0,
        }
    }

    /// Solar elevation at the middle of the observation interval.
    pub fn elevation(&mut self, t: NaiveDateTime, cadence: Cadence) -> f64 {
        let site = self.site;
        let day = self.day(t.date());
        match cadence {
            Cadence::Hourly => day.elevation(site, clock_hours(t) + 0.5),
            Cadence::Daily => day.elevation(site, 12.0 - day.solar_offset),
        }
    }
}

/// Clearness index: measured global over extraterrestrial at matching cadence.
///
/// Night hours (zero extraterrestrial irradiance) are missing; values are
/// clamped to `[0, 1]`.
pub fn clearness_index(global: &ClimateSeries, site: &SiteMeta) -> Result<ClimateSeries> {
    if global.variable() != Variable::GlobalRad {
        return Err(Error::invalid(format!(
            "clearness index needs global_rad, got {}",
            global.variable()
        )));
    }
    let mut cal = SolarCalendar::new(site);
    let values = global
        .iter()
        .map(|(t, g)| {
            let i0 = cal.extraterrestrial(t, global.cadence());
            match g {
                Some(g) if i0 > 0.0 => Some((g / i0).clamp(0.0, 1.0)),
                _ => None,
            }
        })
        .collect();
    global.with_values(Variable::ClearnessIndex, values)
}

/// Sunshine fraction S/S0 of daily insolation hours, clamped to `[0, 1]`.
///
/// The returned series is tagged `clearness_index` because both quantities
/// are dimensionless ratios in `[0, 1]`; callers use it as a predictor.
pub fn sunshine_fraction(insolation: &ClimateSeries, site: &SiteMeta) -> Result<ClimateSeries> {
    if insolation.cadence() != Cadence::Daily {
        return Err(Error::invalid("sunshine fraction needs daily insolation"));
    }
    let mut cal = SolarCalendar::new(site);
    let values = insolation
        .iter()
        .map(|(t, s)| {
            let s0 = cal.day(t.date()).day_length;
            s.map(|s| {
                if s0 > 0.0 {
                    (s / s0).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
        })
        .collect();
    insolation.with_values(Variable::ClearnessIndex, values)
}

/// Solar elevation series on the timestamps of `like`.
pub fn solar_height_series(like: &ClimateSeries, site: &SiteMeta) -> Result<ClimateSeries> {
    let mut cal = SolarCalendar::new(site);
    let values = like
        .timestamps()
        .iter()
        .map(|t| Some(cal.elevation(*t, like.cadence())))
        .collect();
    like.with_values(Variable::SolarHeight, values)
}
