use chrono::NaiveDateTime;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::model::ArmaModel;
use crate::climdata::ClimateSeries;
use crate::{stats, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub values: Vec<f64>,
    /// Values moved back into the variable's physical range.
    pub clipped: usize,
}

impl Simulation {
    pub fn clip_rate(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.clipped as f64 / self.values.len() as f64
        }
    }
}

/// Burn-in discarded before the first returned value.
pub fn burn_in(model: &ArmaModel) -> usize {
    10 * (model.p + model.q) + 50
}

/// Standardized ARMA path of length `n`, deterministic in `seed`.
pub fn simulate_standardized(model: &ArmaModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !model.is_stationary() {
        return Err(Error::NonStationary);
    }
    let mut rng = stats::rng(seed);
    let burn = burn_in(model);
    let total = n + burn;
    let mut x = vec![0.0; total];
    let mut w = vec![0.0; total];
    for t in 0..total {
        let z: f64 = StandardNormal.sample(&mut rng);
        w[t] = model.noise_sigma * z;
        let mut v = w[t];
        for (i, f) in model.phi.iter().enumerate() {
            if t > i {
                v += f * x[t - 1 - i];
            }
        }
        for (j, th) in model.theta.iter().enumerate() {
            if t > j {
                v -= th * w[t - 1 - j];
            }
        }
        x[t] = v;
    }
    Ok(x.split_off(burn))
}

/// Simulated values at the given timestamps, with the seasonal profile
/// restored and values clipped to the variable's range.
pub fn simulate_at(
    model: &ArmaModel,
    timestamps: &[NaiveDateTime],
    seed: u64,
) -> Result<Simulation> {
    let z = simulate_standardized(model, timestamps.len(), seed)?;
    let (lo, hi) = model.variable.range();
    let mut clipped = 0;
    let values = timestamps
        .iter()
        .zip(z)
        .map(|(t, z)| {
            let v = model.deseasonal.restore(*t, z);
            let c = v.clamp(lo, hi);
            if c != v {
                clipped += 1;
            }
            c
        })
        .collect();
    Ok(Simulation { values, clipped })
}

/// Regular series of `n` values starting at `start`.
pub fn simulate(
    model: &ArmaModel,
    start: NaiveDateTime,
    n: usize,
    seed: u64,
) -> Result<(ClimateSeries, Simulation)> {
    let step = model.cadence.step();
    let timestamps: Vec<NaiveDateTime> = (0..n).map(|i| start + step * i as i32).collect();
    let sim = simulate_at(model, &timestamps, seed)?;
    let series = ClimateSeries::new(
        model.variable,
        model.cadence,
        timestamps,
        sim.values.iter().map(|v| Some(*v)).collect(),
    )?;
    Ok((series, sim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arma::{acf_pacf_values, Deseasonal};
    use crate::climdata::{Cadence, Variable};
    use chrono::NaiveDate;

    fn t0() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn ar1(phi: f64, sigma: f64, mean: f64) -> ArmaModel {
        ArmaModel::new(
            Variable::DryBulbTemp,
            Cadence::Hourly,
            vec![phi],
            vec![],
            sigma,
            Deseasonal::flat(mean, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn degenerate_constant() {
        let m = ArmaModel::new(
            Variable::WindSpeed,
            Cadence::Hourly,
            vec![],
            vec![],
            0.0,
            Deseasonal::flat(5.0, 1.0),
        )
        .unwrap();
        let (s, sim) = simulate(&m, t0(), 48, 1).unwrap();
        assert!(s.present().iter().all(|v| *v == 5.0));
        assert_eq!(sim.clipped, 0);
    }

    #[test]
    fn ar1_variance_and_acf() {
        let (s, _) = simulate(&ar1(0.7, 1.0, 0.0), t0(), 100_000, 8).unwrap();
        let x = s.present();
        let var = crate::stats::variance(&x);
        let target = 1.0 / (1.0 - 0.49);
        assert!((var - target).abs() < 0.1 * target, "{var}");
        let a = acf_pacf_values(&x, 5).unwrap();
        for k in 1..=5 {
            assert!((a.r[k] - 0.7f64.powi(k as i32)).abs() < 0.05);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let m = ar1(0.5, 2.0, 10.0);
        let a = simulate(&m, t0(), 500, 3).unwrap().1;
        let b = simulate(&m, t0(), 500, 3).unwrap().1;
        let c = simulate(&m, t0(), 500, 4).unwrap().1;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn wind_clipped_at_zero() {
        let m = ArmaModel::new(
            Variable::WindSpeed,
            Cadence::Hourly,
            vec![0.5],
            vec![],
            1.0,
            Deseasonal::flat(0.5, 1.0),
        )
        .unwrap();
        let (s, sim) = simulate(&m, t0(), 2000, 1).unwrap();
        assert!(s.present().iter().all(|v| *v >= 0.0));
        assert!(sim.clipped > 0 && sim.clip_rate() < 1.0);
    }

    #[test]
    fn refuses_explosive() {
        let mut m = ar1(0.5, 1.0, 0.0);
        m.phi = vec![1.5];
        assert!(matches!(
            simulate(&m, t0(), 10, 1),
            Err(Error::NonStationary)
        ));
    }
}
