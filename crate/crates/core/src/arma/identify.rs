use serde::{Deserialize, Serialize};

use super::acf::{AcfResult, Z95};
use crate::stats;
use crate::{Error, Result};

/// Consecutive insignificant lags that count as a cutoff.
pub const CUTOFF_RUN: usize = 3;
/// Smallest number of lags `identify` accepts.
pub const MIN_IDENTIFY_LAGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmaKind {
    Ar,
    Ma,
    Arma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    pub kind: ArmaKind,
    pub p: usize,
    pub q: usize,
    /// No significant lag in either function.
    pub white_noise: bool,
    /// Last significant PACF lag before the cutoff.
    pub pacf_cutoff: usize,
    /// Last significant ACF lag before the cutoff.
    pub acf_cutoff: usize,
    /// Normal quantile the bands were scaled to.
    pub z: f64,
}

/// Normal quantile used for order identification.
///
/// A cutoff is declared after `CUTOFF_RUN` insignificant lags, i.e. after
/// `CUTOFF_RUN` simultaneous tests, so the 5 % level is shared between them.
/// With the plain 1.96 band a true AR(1) is identified correctly only about
/// 86 % of the time.
pub fn identify_z() -> f64 {
    stats::normal_quantile(1.0 - 0.05 / (2.0 * CUTOFF_RUN as f64))
}

/// Last significant lag before the first run of `CUTOFF_RUN` insignificant
/// lags, scanning from lag 1.
fn cutoff(values: &[f64], bound: impl Fn(usize) -> f64) -> usize {
    let mut last = 0;
    let mut run = 0;
    for k in 1..values.len() {
        if values[k].abs() > bound(k) {
            last = k;
            run = 0;
        } else {
            run += 1;
            if run == CUTOFF_RUN {
                break;
            }
        }
    }
    last
}

/// Suggest ARMA orders from the ACF (Bartlett band) and PACF (Quenouille
/// band).
///
/// `p` is where the PACF cuts off and `q` where the ACF cuts off. The
/// function that cuts off sooner decides the model: PACF first means AR(p),
/// ACF first means MA(q). When both stop at the same lag (neither shows a
/// clean cutoff against a slow decay) the result is ARMA(1, 1), except at
/// lag 1 where AR(1) is the smaller model.
pub fn identify(acf: &AcfResult) -> Result<Identification> {
    if acf.max_lag < MIN_IDENTIFY_LAGS {
        return Err(Error::invalid(format!(
            "identification needs autocorrelations to lag {MIN_IDENTIFY_LAGS}, got {}",
            acf.max_lag
        )));
    }
    let z = identify_z();
    let scale = z / Z95;
    let p = cutoff(&acf.pacf, |_| acf.quenouille_bound * scale);
    let q = cutoff(&acf.r, |k| acf.bartlett_bounds[k] * scale);
    let (kind, p_out, q_out) = match (p, q) {
        (0, 0) => (ArmaKind::Ar, 0, 0),
        _ if p < q => (ArmaKind::Ar, p, 0),
        _ if q < p => (ArmaKind::Ma, 0, q),
        (1, 1) => (ArmaKind::Ar, 1, 0),
        _ => (ArmaKind::Arma, 1, 1),
    };
    Ok(Identification {
        kind,
        p: p_out,
        q: q_out,
        white_noise: p == 0 && q == 0,
        pacf_cutoff: p,
        acf_cutoff: q,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arma::acf::acf_pacf_values;
    use crate::stats;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn bonferroni_quantile() {
        assert!((identify_z() - 2.393_980).abs() < 1e-5);
    }

    #[test]
    fn theoretical_ar1() {
        let r: Vec<f64> = (0..=20).map(|k| 0.7f64.powi(k)).collect();
        let a = AcfResult::from_autocorrelations(r, 1000).unwrap();
        let id = identify(&a).unwrap();
        assert_eq!((id.kind, id.p, id.q), (ArmaKind::Ar, 1, 0));
        assert!(!id.white_noise);
    }

    #[test]
    fn theoretical_ma1() {
        // θ = 0.5 in x = w − θ w₋₁: r(1) = −θ/(1+θ²) = −0.4, zero beyond
        let mut r = vec![0.0; 21];
        r[0] = 1.0;
        r[1] = -0.4;
        let a = AcfResult::from_autocorrelations(r, 5000).unwrap();
        let id = identify(&a).unwrap();
        assert_eq!((id.kind, id.p, id.q), (ArmaKind::Ma, 0, 1));
    }

    #[test]
    fn white_noise_flagged() {
        let mut r = vec![0.0; 21];
        r[0] = 1.0;
        let id = identify(&AcfResult::from_autocorrelations(r, 500).unwrap()).unwrap();
        assert_eq!((id.kind, id.p, id.q), (ArmaKind::Ar, 0, 0));
        assert!(id.white_noise);
    }

    #[test]
    fn needs_twenty_lags() {
        let r: Vec<f64> = (0..=10).map(|k| 0.5f64.powi(k)).collect();
        assert!(identify(&AcfResult::from_autocorrelations(r, 100).unwrap()).is_err());
    }

    #[test]
    fn simulated_ar2_identified() {
        let mut hits = 0;
        for seed in 0..50 {
            let mut rng = stats::rng(seed);
            let mut x = vec![0.0; 2100];
            for t in 2..x.len() {
                let w: f64 = StandardNormal.sample(&mut rng);
                x[t] = 0.6 * x[t - 1] - 0.3 * x[t - 2] + w;
            }
            let id = identify(&acf_pacf_values(&x[100..], 20).unwrap()).unwrap();
            if (id.kind, id.p, id.q) == (ArmaKind::Ar, 2, 0) {
                hits += 1;
            }
        }
        assert!(hits >= 45, "{hits}/50");
    }
}
