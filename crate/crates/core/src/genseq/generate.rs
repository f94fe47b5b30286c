use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coherence::{derive_variables, enforce_coherence, CoherenceReport};
use super::model::FittedModel;
use super::plan::GenerationPlan;
use super::registry::RegistrySnapshot;
use super::resolve::{resolve, Derivation, Resolution, Source};
use crate::arma::simulate_at;
use crate::climdata::psychro::standard_pressure;
use crate::climdata::{Cadence, Variable, WeatherTable};
use crate::solargeo::SolarCalendar;
use crate::stats::{mix_seed, rng};
use crate::validate::ks_two_sample;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelUse {
    pub variable: Variable,
    /// Registry file name, or `derived:<rule>`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceProvenance {
    pub software_version: String,
    pub plan: GenerationPlan,
    pub models: Vec<ModelUse>,
    pub decisions: Vec<String>,
    pub notes: Vec<String>,
    pub coherence: CoherenceReport,
    /// Generation attempts used (above 1 only with the KS gate).
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSequence {
    /// Requested columns only.
    pub table: WeatherTable,
    pub provenance: SequenceProvenance,
}

fn salt(v: Variable) -> u64 {
    Variable::ALL.iter().position(|x| *x == v).unwrap() as u64 + 1
}

/// Generates the plan's sequence from the models in `snapshot`.
///
/// The output is a pure function of the plan and the snapshot.
pub fn generate(plan: &GenerationPlan, snapshot: &RegistrySnapshot) -> Result<GeneratedSequence> {
    let resolution = resolve(plan, snapshot)?;
    synthesize(plan, &resolution)
}

/// Independent plans generated in parallel; results keep the input order.
pub fn generate_batch(
    plans: &[GenerationPlan],
    snapshot: &RegistrySnapshot,
) -> Vec<Result<GeneratedSequence>> {
    plans.par_iter().map(|p| generate(p, snapshot)).collect()
}

/// Rejection mode: regenerates with derived seeds until every requested
/// variable present in `reference` passes a two-sample KS test at
/// `alpha`, giving up after `max_attempts`.
pub fn generate_gated(
    plan: &GenerationPlan,
    snapshot: &RegistrySnapshot,
    reference: &WeatherTable,
    alpha: f64,
    max_attempts: usize,
) -> Result<GeneratedSequence> {
    let resolution = resolve(plan, snapshot)?;
    let keep: Vec<bool> = reference
        .timestamps
        .iter()
        .map(|t| plan.criteria.matches_time(*t))
        .collect();
    let reference = reference.filter_rows(&keep);
    let mut worst = String::new();
    for attempt in 0..max_attempts.max(1) {
        let seed = if attempt == 0 {
            plan.seed
        } else {
            mix_seed(plan.seed, 0xA77E_0000 + attempt as u64)
        };
        let mut seq = synthesize(&plan.with_seed(seed), &resolution)?;
        let mut ok = true;
        for v in &plan.variables {
            let (Some(g), Some(r)) = (seq.table.column(*v), reference.column(*v)) else {
                continue;
            };
            let g: Vec<f64> = g.iter().flatten().copied().collect();
            let r: Vec<f64> = r.iter().flatten().copied().collect();
            let ks = ks_two_sample(&g, &r, alpha)?;
            if !ks.pass {
                ok = false;
                worst = format!("{v}: D = {:.4} > {:.4}", ks.d, ks.critical);
                break;
            }
        }
        if ok {
            seq.provenance.attempts = attempt + 1;
            seq.provenance.plan.seed = plan.seed;
            seq.provenance.notes.push(format!(
                "KS gate passed on attempt {} with seed {seed}",
                attempt + 1
            ));
            return Ok(seq);
        }
    }
    Err(Error::Convergence(format!(
        "KS gate still failing after {max_attempts} attempts ({worst})"
    )))
}

fn noise(rng: &mut impl Rng, sd: f64) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).map(|n| n.sample(rng)).unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Stages 1 to 5 for an already resolved plan.
pub fn synthesize(plan: &GenerationPlan, resolution: &Resolution) -> Result<GeneratedSequence> {
    let timeline = plan.timeline();
    let n = timeline.len();
    let cadence = plan.cadence;
    let mut cal = SolarCalendar::new(&plan.site);
    let i0: Vec<f64> = timeline
        .iter()
        .map(|t| cal.extraterrestrial(*t, cadence))
        .collect();
    let mut table = WeatherTable::new(cadence, timeline.clone());
    let mut notes = Vec::new();
    let mut derive_later = false;

    for a in &resolution.assignments {
        let v = a.variable;
        let seed = mix_seed(plan.seed, salt(v));
        let mut r = rng(seed);
        let values: Vec<Option<f64>> = match &a.source {
            Source::Derived(Derivation::WetBulb | Derivation::SkyTemp) => {
                derive_later = true;
                continue;
            }
            Source::Derived(Derivation::GlobalFromKt) => {
                let kt = table.column(Variable::ClearnessIndex).unwrap();
                (0..n)
                    .map(|i| {
                        if i0[i] <= 0.0 {
                            Some(0.0)
                        } else {
                            kt[i].map(|k| k * i0[i])
                        }
                    })
                    .collect()
            }
            Source::Derived(Derivation::BeamBalance) => {
                let g = table.column(Variable::GlobalRad).unwrap();
                let d = table.column(Variable::DiffuseRad).unwrap();
                (0..n).map(|i| Some(g[i]? - d[i]?)).collect()
            }
            Source::Derived(Derivation::StandardPressure) => {
                vec![Some(standard_pressure(plan.site.altitude)); n]
            }
            Source::Derived(Derivation::SolarHeight) => timeline
                .iter()
                .map(|t| Some(cal.elevation(*t, cadence)))
                .collect(),
            Source::Model(entry) => match &entry.model {
                FittedModel::Arma(m) => {
                    let sim = simulate_at(m, &timeline, seed)?;
                    if sim.clipped > 0 {
                        notes.push(format!(
                            "{v}: {} simulated value(s) clipped to the physical range",
                            sim.clipped
                        ));
                    }
                    sim.values
                        .into_iter()
                        .zip(&i0)
                        .map(|(x, i0)| (v != Variable::ClearnessIndex || *i0 > 0.0).then_some(x))
                        .collect()
                }
                FittedModel::Weibull(w) => (0..n)
                    .map(|_| Some(w.quantile(crate::distfit::open_unit(&mut r))))
                    .collect(),
                FittedModel::Gaussian(g) => (0..n).map(|_| Some(g.sample_one(&mut r))).collect(),
                FittedModel::Saunier(s) => {
                    if cadence == Cadence::Hourly {
                        notes.push(format!(
                            "{v}: daily values drawn from the Saunier law and held over daylight hours"
                        ));
                    }
                    let mut out = Vec::with_capacity(n);
                    let mut current: Option<(chrono::NaiveDate, f64)> = None;
                    for (t, i0) in timeline.iter().zip(&i0) {
                        let kt = match current {
                            Some((d, k)) if d == t.date() => k,
                            _ => {
                                let k = s.kt_max * s.sample_x(&mut r);
                                current = Some((t.date(), k));
                                k
                            }
                        };
                        out.push((*i0 > 0.0).then_some(kt));
                    }
                    out
                }
                FittedModel::Correlation(c) => {
                    let sd = if plan.options.residual_noise {
                        c.diagnostics.residual_std
                    } else {
                        0.0
                    };
                    let cols = input_columns(&table, &c.predictors)?;
                    let mut out = Vec::with_capacity(n);
                    for i in 0..n {
                        if v.is_radiation() && i0[i] <= 0.0 {
                            out.push(Some(0.0));
                            continue;
                        }
                        out.push(match row(&cols, i) {
                            Some(x) => Some(c.evaluate(&x)? + noise(&mut r, sd)),
                            None => None,
                        });
                    }
                    out
                }
                FittedModel::Neural(m) => {
                    let sd = match (&m.report, plan.options.residual_noise) {
                        (Some(rep), true) => rep.eqm_history.last().copied().unwrap_or(0.0).sqrt(),
                        _ => 0.0,
                    };
                    let cols = input_columns(&table, &m.inputs)?;
                    let mut out = Vec::with_capacity(n);
                    for i in 0..n {
                        if v.is_radiation() && i0[i] <= 0.0 {
                            out.push(Some(0.0));
                            continue;
                        }
                        out.push(match row(&cols, i) {
                            Some(x) => Some(m.forward(&x)? + noise(&mut r, sd)),
                            None => None,
                        });
                    }
                    out
                }
            },
        };
        table.insert(v, values)?;
    }

    let coherence = enforce_coherence(&mut table, Some(&plan.site));
    let limit = plan.options.max_repair_rate;
    if coherence.repair_rate() > limit {
        return Err(Error::Inconsistent {
            rate: 100.0 * coherence.repair_rate(),
            limit: 100.0 * limit,
        });
    }
    if derive_later {
        let sky = plan.options.sky_temperature || plan.variables.contains(&Variable::SkyTemp);
        derive_variables(&mut table, &plan.site, sky)?;
    }
    table.retain(&plan.variables_with_options());

    Ok(GeneratedSequence {
        table,
        provenance: SequenceProvenance {
            software_version: crate::VERSION.into(),
            plan: plan.clone(),
            models: resolution
                .assignments
                .iter()
                .map(|a| ModelUse {
                    variable: a.variable,
                    source: a.source.label(),
                })
                .collect(),
            decisions: resolution.decisions.clone(),
            notes,
            coherence,
            attempts: 1,
        },
    })
}

fn input_columns<'a>(
    table: &'a WeatherTable,
    inputs: &[Variable],
) -> Result<Vec<&'a [Option<f64>]>> {
    inputs
        .iter()
        .map(|v| {
            table
                .column(*v)
                .ok_or_else(|| Error::invalid(format!("input {v} was not generated before use")))
        })
        .collect()
}

fn row(cols: &[&[Option<f64>]], i: usize) -> Option<Vec<f64>> {
    cols.iter().map(|c| c[i]).collect()
}
