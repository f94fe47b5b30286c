use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Climate variables handled by the toolkit.
///
/// Declaration order is the fixed column order of exported tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// Dry-bulb air temperature, °C.
    DryBulbTemp,
    /// Wet-bulb temperature, °C.
    WetBulbTemp,
    /// Relative humidity, %.
    RelHumidity,
    /// Wind speed, m/s.
    WindSpeed,
    /// Wind direction, degrees from north.
    WindDirection,
    /// Global horizontal irradiance, W/m² (day-mean irradiance for daily data).
    GlobalRad,
    /// Diffuse horizontal irradiance, W/m².
    DiffuseRad,
    /// Beam horizontal irradiance, W/m².
    BeamRad,
    /// Sunshine duration, hours.
    InsolationHours,
    /// Cloud cover, octas.
    Nebulosity,
    /// Station pressure, hPa.
    Pressure,
    /// Clearness index, dimensionless.
    ClearnessIndex,
    /// Effective sky temperature, °C.
    SkyTemp,
    /// Solar elevation angle, degrees.
    SolarHeight,
}

impl Variable {
    pub const ALL: [Variable; 14] = [
        Variable::DryBulbTemp,
        Variable::WetBulbTemp,
        Variable::RelHumidity,
        Variable::WindSpeed,
        Variable::WindDirection,
        Variable::GlobalRad,
        Variable::DiffuseRad,
        Variable::BeamRad,
        Variable::InsolationHours,
        Variable::Nebulosity,
        Variable::Pressure,
        Variable::ClearnessIndex,
        Variable::SkyTemp,
        Variable::SolarHeight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::DryBulbTemp => "dry_bulb_temp",
            Variable::WetBulbTemp => "wet_bulb_temp",
            Variable::RelHumidity => "rel_humidity",
            Variable::WindSpeed => "wind_speed",
            Variable::WindDirection => "wind_direction",
            Variable::GlobalRad => "global_rad",
            Variable::DiffuseRad => "diffuse_rad",
            Variable::BeamRad => "beam_rad",
            Variable::InsolationHours => "insolation_hours",
            Variable::Nebulosity => "nebulosity",
            Variable::Pressure => "pressure",
            Variable::ClearnessIndex => "clearness_index",
            Variable::SkyTemp => "sky_temp",
            Variable::SolarHeight => "solar_height",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Variable::DryBulbTemp | Variable::WetBulbTemp | Variable::SkyTemp => "°C",
            Variable::RelHumidity => "%",
            Variable::WindSpeed => "m/s",
            Variable::WindDirection | Variable::SolarHeight => "deg",
            Variable::GlobalRad | Variable::DiffuseRad | Variable::BeamRad => "W/m²",
            Variable::InsolationHours => "h",
            Variable::Nebulosity => "octas",
            Variable::Pressure => "hPa",
            Variable::ClearnessIndex => "-",
        }
    }

    /// Physically admissible closed range.
    pub fn range(self) -> (f64, f64) {
        match self {
            Variable::RelHumidity => (0.0, 100.0),
            Variable::WindSpeed
            | Variable::GlobalRad
            | Variable::DiffuseRad
            | Variable::BeamRad
            | Variable::InsolationHours => (0.0, f64::INFINITY),
            Variable::WindDirection => (0.0, 360.0),
            Variable::Nebulosity => (0.0, 8.0),
            Variable::ClearnessIndex => (0.0, 1.0),
            Variable::Pressure => (0.0, f64::INFINITY),
            Variable::SolarHeight => (-90.0, 90.0),
            Variable::DryBulbTemp | Variable::WetBulbTemp | Variable::SkyTemp => {
                (-273.15, f64::INFINITY)
            }
        }
    }

    pub fn admits(self, value: f64) -> bool {
        let (lo, hi) = self.range();
        value.is_finite() && value >= lo && value <= hi
    }

    pub fn is_radiation(self) -> bool {
        matches!(
            self,
            Variable::GlobalRad | Variable::DiffuseRad | Variable::BeamRad
        )
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variable::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::UnknownVariable(s.trim().to_string()))
    }
}
