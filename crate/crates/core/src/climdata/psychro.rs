//! Psychrometric relations.
//!
//! Saturation vapour pressure over water uses the Magnus form with the
//! Alduchov-Eskridge (1996) coefficients:
//!
//! ```text
//! es(T) = 6.1094 · exp(17.625 T / (T + 243.04))      [hPa, T in °C]
//! ```
//!
//! The wet-bulb temperature solves the ventilated psychrometer balance
//!
//! ```text
//! e = es(Tw) − A(Tw) · p · (T − Tw),   A(Tw) = 6.6e-4 · (1 + 0.00115 Tw)  [1/K]
//! ```
//!
//! where `e = rh/100 · es(T)` is the actual vapour pressure.

use crate::{Error, Result};

const MAGNUS_A: f64 = 6.1094;
const MAGNUS_B: f64 = 17.625;
const MAGNUS_C: f64 = 243.04;

/// Saturation vapour pressure, hPa.
pub fn saturation_vapor_pressure(t: f64) -> f64 {
    MAGNUS_A * (MAGNUS_B * t / (t + MAGNUS_C)).exp()
}

/// Dew point, °C. Requires `rh > 0`.
pub fn dew_point(t: f64, rh: f64) -> f64 {
    let g = (rh / 100.0).ln() + MAGNUS_B * t / (MAGNUS_C + t);
    MAGNUS_C * g / (MAGNUS_B - g)
}

fn psychrometer_coefficient(tw: f64) -> f64 {
    6.6e-4 * (1.0 + 0.00115 * tw)
}

/// Residual of the psychrometer balance; increasing in `tw`.
pub fn wet_bulb_residual(tw: f64, t: f64, rh: f64, pressure: f64) -> f64 {
    let e = rh / 100.0 * saturation_vapor_pressure(t);
    saturation_vapor_pressure(tw) - psychrometer_coefficient(tw) * pressure * (t - tw) - e
}

/// Wet-bulb temperature (°C) by bisection between the dew point and `t_db`.
///
/// `rh` in percent, `pressure` in hPa. The result never exceeds `t_db`.
pub fn wet_bulb(t_db: f64, rh: f64, pressure: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&rh) {
        return Err(Error::invalid(format!(
            "relative humidity {rh} outside [0, 100]"
        )));
    }
    if !(pressure > 0.0) || !t_db.is_finite() {
        return Err(Error::invalid(format!(
            "bad psychrometric state t={t_db} p={pressure}"
        )));
    }
    if rh == 100.0 {
        return Ok(t_db);
    }
    let f = |tw: f64| wet_bulb_residual(tw, t_db, rh, pressure);
    let mut lo = if rh > 0.0 {
        dew_point(t_db, rh)
    } else {
        t_db - 40.0
    };
    while f(lo) > 0.0 {
        lo -= 40.0;
        if lo < -200.0 {
            return Err(Error::Convergence("wet bulb bracket".into()));
        }
    }
    let mut hi = t_db;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-11 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).min(t_db))
}

/// Standard-atmosphere station pressure at `altitude` meters, hPa.
pub fn standard_pressure(altitude: f64) -> f64 {
    1013.25 * (1.0 - 2.25577e-5 * altitude).powf(5.25588)
}

/// Effective sky temperature, °C.
///
/// Clear-sky emissivity from the dew point (Clark-Allen), corrected for
/// cloud cover given in octas (Walton), as used by common building
/// simulation engines:
///
/// ```text
/// ε = (0.787 + 0.764 ln(Tdp/273)) · (1 + 0.0224 N − 0.0035 N² + 0.00028 N³)
/// Tsky = ε^¼ · Tdb        (kelvin; N in tenths)
/// ```
pub fn sky_temperature(t_db: f64, rh: f64, nebulosity_octas: f64) -> f64 {
    let tdp = dew_point(t_db, rh.max(1.0)) + 273.15;
    let n = nebulosity_octas.clamp(0.0, 8.0) * 10.0 / 8.0;
    let eps = (0.787 + 0.764 * (tdp / 273.0).ln())
        * (1.0 + 0.0224 * n - 0.0035 * n * n + 0.00028 * n * n * n);
    eps.clamp(0.0, 1.0).powf(0.25) * (t_db + 273.15) - 273.15
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_air_wet_bulb_equals_dry_bulb() {
        assert_eq!(wet_bulb(25.0, 100.0, 1013.25).unwrap(), 25.0);
        assert!((wet_bulb(25.0, 99.999999, 1013.25).unwrap() - 25.0).abs() < 1e-5);
    }

    #[test]
    fn frozen_thirty_degrees_half_humidity() {
        // Oracle: dense scan of the balance residual on a 1e-7 K grid
        // around the sign change, independent of the bisection path.
        let (t, rh, p) = (30.0, 50.0, 1013.0);
        let mut lo = 15.0;
        let mut step = 1.0;
        while step > 1e-8 {
            while wet_bulb_residual(lo + step, t, rh, p) < 0.0 {
                lo += step;
            }
            step /= 10.0;
        }
        let tw = wet_bulb(t, rh, p).unwrap();
        assert!((tw - lo).abs() < 1e-6, "{tw} vs {lo}");
        assert!((tw - 22.122_811_9).abs() < 1e-6, "{tw}");
        assert!(tw > dew_point(t, rh) && tw < t);
        assert!(wet_bulb_residual(tw, t, rh, p).abs() < 1e-6);
    }

    #[test]
    fn rejects_supersaturation() {
        assert!(wet_bulb(20.0, 120.0, 1013.0).is_err());
        assert!(wet_bulb(20.0, 50.0, 0.0).is_err());
    }

    #[test]
    fn dry_air_still_solves() {
        let tw = wet_bulb(30.0, 0.0, 1013.25).unwrap();
        assert!(tw < 30.0 && tw > 5.0);
    }

    #[test]
    fn wet_bulb_increases_with_humidity() {
        for t in [-5.0, 10.0, 25.0, 38.0] {
            let mut prev = f64::NEG_INFINITY;
            for rh in (0..=100).map(|r| r as f64) {
                let tw = wet_bulb(t, rh, 1000.0).unwrap();
                assert!(tw > prev, "t={t} rh={rh}");
                assert!(tw <= t);
                prev = tw;
            }
        }
    }

    #[test]
    fn dew_point_inverts_saturation() {
        let td = dew_point(25.0, 60.0);
        assert!(
            (saturation_vapor_pressure(td) - 0.6 * saturation_vapor_pressure(25.0)).abs() < 1e-9
        );
    }

    #[test]
    fn sky_colder_than_air_and_warmer_when_cloudy() {
        let clear = sky_temperature(25.0, 70.0, 0.0);
        let overcast = sky_temperature(25.0, 70.0, 8.0);
        assert!(clear < 25.0);
        assert!(overcast > clear);
        assert!((standard_pressure(0.0) - 1013.25).abs() < 1e-12);
    }
}
