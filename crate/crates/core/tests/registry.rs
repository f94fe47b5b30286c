mod common;

use common::{at, provenance};
use weathergen::arma::{estimate, simulate_standardized};
use weathergen::climdata::{Cadence, ClimateSeries, SelectionCriteria, Variable};
use weathergen::corrfit::{fit_rows, Template};
use weathergen::distfit::{saunier_solve, WeibullParams};
use weathergen::genseq::{FittedModel, ModelKind, ModelRegistry, RegistryEntry};
use weathergen::neuralfit::{train_lm, TrainOptions};

fn stored_and_reloaded(model: FittedModel, v: Variable) -> (FittedModel, FittedModel) {
    let dir = tempfile::tempdir().unwrap();
    let criteria = SelectionCriteria::months([8]).unwrap();
    let entry = RegistryEntry::new(v, Cadence::Hourly, criteria, model.clone(), provenance());
    ModelRegistry::open(dir.path())
        .unwrap()
        .put(&entry)
        .unwrap();
    // a fresh handle reads from disk only
    let reopened = ModelRegistry::open(dir.path()).unwrap();
    let back = reopened.get(&entry.key).unwrap().expect("entry present");
    assert_eq!(back, entry);
    (model, back.model)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

#[test]
fn arma_simulates_identically_after_reload() {
    let values: Vec<f64> = (0..500)
        .map(|i| 5.0 + (i as f64 * 0.37).sin() + (i as f64 * 0.05).cos())
        .collect();
    let s = ClimateSeries::from_values(
        Variable::WindSpeed,
        Cadence::Hourly,
        at(2001, 8, 1, 0),
        &values,
    )
    .unwrap();
    let m = estimate(&s, 2, 0).unwrap();
    let (a, b) = stored_and_reloaded(FittedModel::Arma(m), Variable::WindSpeed);
    let (FittedModel::Arma(a), FittedModel::Arma(b)) = (a, b) else {
        panic!("kind changed")
    };
    let (x, y) = (
        simulate_standardized(&a, 200, 3).unwrap(),
        simulate_standardized(&b, 200, 3).unwrap(),
    );
    assert!(x.iter().zip(&y).all(|(p, q)| close(*p, *q)));
}

#[test]
fn correlation_evaluates_identically_after_reload() {
    let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 40.0]).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| 0.9 - 1.1 * x[0] + 0.3 * x[0] * x[0] + 0.01 * (x[0] * 91.0).sin())
        .collect();
    let t = Template::poly(2);
    let m = fit_rows(
        &t,
        Variable::DiffuseRad,
        &[Variable::ClearnessIndex],
        xs,
        ys,
        SelectionCriteria::all(),
    )
    .unwrap();
    let (a, b) = stored_and_reloaded(FittedModel::Correlation(m), Variable::DiffuseRad);
    let (FittedModel::Correlation(a), FittedModel::Correlation(b)) = (a, b) else {
        panic!("kind changed")
    };
    for probe in [0.0, 0.13, 0.5, 0.77, 1.0] {
        assert!(close(
            a.evaluate(&[probe]).unwrap(),
            b.evaluate(&[probe]).unwrap()
        ));
    }
}

#[test]
fn network_evaluates_identically_after_reload() {
    let xs: Vec<Vec<f64>> = (0..60)
        .map(|i| vec![i as f64 * 10.0, (i % 9) as f64])
        .collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| 20.0 + (x[0] / 300.0).tanh() * 5.0 - 0.4 * x[1])
        .collect();
    let m = train_lm(
        &xs,
        &ys,
        TrainOptions {
            n_hidden: 3,
            ..Default::default()
        },
    )
    .unwrap();
    let (a, b) = stored_and_reloaded(FittedModel::Neural(m), Variable::DryBulbTemp);
    assert_eq!(b.kind(), ModelKind::Neural);
    let (FittedModel::Neural(a), FittedModel::Neural(b)) = (a, b) else {
        panic!("kind changed")
    };
    for probe in [[0.0, 0.0], [123.4, 5.0], [590.0, 8.0], [-50.0, 2.5]] {
        assert!(close(
            a.forward(&probe).unwrap(),
            b.forward(&probe).unwrap()
        ));
    }
}

#[test]
fn distributions_evaluate_identically_after_reload() {
    let sp = saunier_solve(0.47, 0.76).unwrap();
    let (FittedModel::Saunier(a), FittedModel::Saunier(b)) =
        stored_and_reloaded(FittedModel::Saunier(sp), Variable::ClearnessIndex)
    else {
        panic!("kind changed")
    };
    for x in [0.05, 0.3, 0.61, 0.99] {
        assert!(close(a.pdf(x), b.pdf(x)));
        assert!(close(a.cdf(x), b.cdf(x)));
    }
    let wp = WeibullParams::new(1.83, 4.71).unwrap();
    let (FittedModel::Weibull(a), FittedModel::Weibull(b)) =
        stored_and_reloaded(FittedModel::Weibull(wp), Variable::WindSpeed)
    else {
        panic!("kind changed")
    };
    for p in [0.01, 0.5, 0.99] {
        assert!(close(a.quantile(p), b.quantile(p)));
    }
}

#[test]
fn listing_and_removal() {
    let dir = tempfile::tempdir().unwrap();
    let reg = common::hourly_registry(dir.path());
    let names = reg.list().unwrap();
    assert_eq!(names.len(), 3);
    assert!(names.windows(2).all(|w| w[0] < w[1]));
    let key = weathergen::genseq::RegistryKey::parse_file_name(&names[0]).unwrap();
    assert!(reg.remove(&key).unwrap());
    assert!(!reg.remove(&key).unwrap());
    assert_eq!(reg.snapshot().unwrap().entries.len(), 2);
}
