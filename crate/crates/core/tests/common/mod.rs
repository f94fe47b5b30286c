#![allow(dead_code)]

use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};
use weathergen::climdata::{Cadence, SelectionCriteria, SiteMeta, Variable};
use weathergen::distfit::{GaussianParams, WeibullParams};
use weathergen::genseq::{FittedModel, GenerationPlan, ModelRegistry, Provenance, RegistryEntry};

pub fn at(y: i32, m: u32, d: u32, h: u32) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(y, m, d)
        .unwrap()
        .and_hms_opt(h, 0, 0)
        .unwrap()
}

pub fn provenance() -> Provenance {
    Provenance {
        fitted_at: at(2024, 1, 1, 0),
        data_start: None,
        data_end: None,
        n: 100,
        diagnostics: serde_json::Value::Null,
        software_version: "test".into(),
        notes: vec![],
    }
}

/// Registry holding hourly August laws for temperature, humidity and wind.
pub fn hourly_registry(dir: &Path) -> ModelRegistry {
    let reg = ModelRegistry::open(dir).unwrap();
    let aug = SelectionCriteria::months([8]).unwrap();
    let models = [
        (
            Variable::DryBulbTemp,
            FittedModel::Gaussian(GaussianParams::new(24.0, 2.0).unwrap()),
        ),
        (
            Variable::RelHumidity,
            FittedModel::Gaussian(GaussianParams::new(70.0, 8.0).unwrap()),
        ),
        (
            Variable::WindSpeed,
            FittedModel::Weibull(WeibullParams::new(2.0, 5.0).unwrap()),
        ),
    ];
    for (v, m) in models {
        reg.put(&RegistryEntry::new(
            v,
            Cadence::Hourly,
            aug.clone(),
            m,
            provenance(),
        ))
        .unwrap();
    }
    reg
}

pub fn hourly_plan(hours: usize, seed: u64) -> GenerationPlan {
    GenerationPlan::new(
        SiteMeta::gillot(),
        vec![
            Variable::DryBulbTemp,
            Variable::RelHumidity,
            Variable::WindSpeed,
        ],
        at(2010, 8, 1, 0),
        hours,
        Cadence::Hourly,
        SelectionCriteria::months([8]).unwrap(),
        seed,
    )
}

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["weathergen"];
    full.extend_from_slice(args);
    let code = weathergen::cli::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}
