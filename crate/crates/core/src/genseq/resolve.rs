use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{FittedModel, ModelKind, RegistryEntry};
use super::plan::GenerationPlan;
use super::registry::RegistrySnapshot;
use crate::climdata::{Cadence, Predicate, SelectionCriteria, Variable};
use crate::neuralfit::default_inputs;
use crate::{Error, Result, Unresolved};

/// Quantities computed from other columns instead of a stored model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    /// Global irradiance as clearness index times extraterrestrial irradiance.
    GlobalFromKt,
    /// Beam irradiance as global minus diffuse.
    BeamBalance,
    /// Station pressure of the standard atmosphere at the site altitude.
    StandardPressure,
    SolarHeight,
    WetBulb,
    SkyTemp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Model(Box<RegistryEntry>),
    Derived(Derivation),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Model(e) => e.key.file_name(),
            Source::Derived(d) => format!(
                "derived:{}",
                serde_json::to_value(d).unwrap().as_str().unwrap()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub variable: Variable,
    pub source: Source,
    pub inputs: Vec<Variable>,
}

/// Model assignment for every variable a plan needs, in generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub assignments: Vec<Assignment>,
    /// Choices made between several candidates.
    pub decisions: Vec<String>,
}

impl Resolution {
    pub fn get(&self, v: Variable) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.variable == v)
    }
}

/// Generation stage: stochastic drivers, radiation, thermodynamics, derived.
fn stage(v: Variable) -> u8 {
    match v {
        Variable::WindSpeed | Variable::WindDirection | Variable::ClearnessIndex => 1,
        Variable::GlobalRad
        | Variable::DiffuseRad
        | Variable::BeamRad
        | Variable::InsolationHours
        | Variable::Nebulosity
        | Variable::SolarHeight => 2,
        Variable::DryBulbTemp | Variable::RelHumidity | Variable::Pressure => 3,
        Variable::WetBulbTemp | Variable::SkyTemp => 5,
    }
}

/// Model kinds able to produce `v`, most preferred first.
pub fn allowed_kinds(v: Variable) -> &'static [ModelKind] {
    use ModelKind::*;
    match v {
        Variable::WindSpeed => &[Arma, Weibull],
        Variable::WindDirection => &[Arma, Correlation],
        Variable::ClearnessIndex => &[Arma, Saunier],
        Variable::DiffuseRad | Variable::InsolationHours | Variable::Nebulosity => {
            &[Correlation, Neural]
        }
        Variable::DryBulbTemp | Variable::RelHumidity => &[Neural, Correlation, Arma, Gaussian],
        Variable::Pressure => &[Gaussian, Arma],
        Variable::GlobalRad
        | Variable::BeamRad
        | Variable::SolarHeight
        | Variable::WetBulbTemp
        | Variable::SkyTemp => &[],
    }
}

fn derivation(v: Variable) -> Option<(Derivation, Vec<Variable>)> {
    match v {
        Variable::GlobalRad => Some((Derivation::GlobalFromKt, vec![Variable::ClearnessIndex])),
        Variable::BeamRad => Some((
            Derivation::BeamBalance,
            vec![Variable::GlobalRad, Variable::DiffuseRad],
        )),
        Variable::SolarHeight => Some((Derivation::SolarHeight, vec![])),
        Variable::WetBulbTemp => Some((
            Derivation::WetBulb,
            vec![Variable::DryBulbTemp, Variable::RelHumidity],
        )),
        Variable::SkyTemp => Some((
            Derivation::SkyTemp,
            vec![Variable::DryBulbTemp, Variable::RelHumidity],
        )),
        _ => None,
    }
}

/// Command line that would fit a model for `v` under `criteria`.
pub fn suggestion(v: Variable, criteria: &SelectionCriteria) -> String {
    let months = criteria
        .months
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let base =
        |what: &str| format!("weathergen fit {what} <measured.csv> --var {v} --months {months}");
    match allowed_kinds(v).first() {
        Some(ModelKind::Arma) => base("arma"),
        Some(ModelKind::Correlation) => {
            let template = if v == Variable::DiffuseRad {
                "erbs"
            } else {
                "poly1"
            };
            format!(
                "{} --predictors clearness_index --template {template}",
                base("corr")
            )
        }
        Some(ModelKind::Neural) => {
            let inputs: Vec<&str> = default_inputs(v).iter().map(|i| i.name()).collect();
            format!("{} --inputs {}", base("nn"), inputs.join(","))
        }
        Some(ModelKind::Gaussian) => format!("{} --law gaussian", base("dist")),
        _ => base("arma"),
    }
}

fn same_predicates(a: &[Predicate], b: &[Predicate]) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.contains(p))
}

fn usable(entry: &RegistryEntry, v: Variable, plan: &GenerationPlan) -> bool {
    let kind = entry.model.kind();
    let cadence_ok = match kind {
        // daily Kt laws are spread over the hours of hourly plans
        ModelKind::Saunier => entry.cadence == Cadence::Daily,
        _ => entry.cadence == plan.cadence,
    };
    entry.key.variable == v
        && allowed_kinds(v).contains(&kind)
        && cadence_ok
        && plan.criteria.months.is_subset(&entry.criteria.months)
}

struct Resolver<'a> {
    plan: &'a GenerationPlan,
    snapshot: &'a RegistrySnapshot,
    done: BTreeMap<Variable, Assignment>,
    visiting: Vec<Variable>,
    unresolved: Vec<Unresolved>,
    decisions: Vec<String>,
}

impl Resolver<'_> {
    fn pick(&mut self, v: Variable) -> Result<Option<RegistryEntry>> {
        if let Some(name) = self.plan.overrides.get(&v) {
            let entry = self
                .snapshot
                .entries
                .iter()
                .find(|e| e.key.file_name() == *name)
                .ok_or_else(|| {
                    Error::invalid(format!("override for {v}: no registry entry '{name}'"))
                })?;
            if entry.key.variable != v {
                return Err(Error::invalid(format!(
                    "override '{name}' does not model {v}"
                )));
            }
            self.decisions
                .push(format!("{v}: {name} forced by plan override"));
            return Ok(Some(entry.clone()));
        }
        let plan = self.plan;
        let kinds = allowed_kinds(v);
        let mut candidates: Vec<&RegistryEntry> = self
            .snapshot
            .entries
            .iter()
            .filter(|e| usable(e, v, plan))
            .collect();
        // predicate match, exact months, hour window, kind preference,
        // preferred driver, newest fit, file name
        candidates.sort_by_key(|e| {
            let driver = match &e.model {
                FittedModel::Correlation(c) if v == Variable::Nebulosity => {
                    !c.predictors.contains(&plan.options.nebulosity_driver)
                }
                _ => false,
            };
            (
                !same_predicates(&e.criteria.predicates, &plan.criteria.predicates),
                e.criteria.months != plan.criteria.months,
                e.criteria.hour_range != plan.criteria.hour_range,
                kinds.iter().position(|k| *k == e.model.kind()),
                driver,
                Reverse(e.provenance.fitted_at),
                e.key.file_name(),
            )
        });
        if candidates.len() > 1 {
            self.decisions.push(format!(
                "{v}: chose {} over {} other candidate(s)",
                candidates[0].key.file_name(),
                candidates.len() - 1
            ));
        }
        Ok(candidates.first().map(|e| (*e).clone()))
    }

    fn need(&mut self, v: Variable) -> Result<()> {
        if self.done.contains_key(&v) || self.unresolved.iter().any(|u| u.variable == v) {
            return Ok(());
        }
        if self.visiting.contains(&v) {
            let cycle: Vec<&str> = self.visiting.iter().map(|v| v.name()).collect();
            return Err(Error::invalid(format!(
                "model inputs form a cycle through {} -> {v}",
                cycle.join(" -> ")
            )));
        }
        self.visiting.push(v);
        let chosen = match derivation(v) {
            Some((d, inputs)) => Some((Source::Derived(d), inputs)),
            None => match self.pick(v)? {
                Some(e) => {
                    let inputs = e.model.inputs();
                    Some((Source::Model(Box::new(e)), inputs))
                }
                None if v == Variable::Pressure => {
                    Some((Source::Derived(Derivation::StandardPressure), vec![]))
                }
                None => None,
            },
        };
        match chosen {
            Some((source, inputs)) => {
                for i in &inputs {
                    self.need(*i)?;
                }
                self.done.insert(
                    v,
                    Assignment {
                        variable: v,
                        source,
                        inputs,
                    },
                );
            }
            None => self.unresolved.push(Unresolved {
                variable: v,
                period: self.plan.criteria.period_label(),
                suggestion: suggestion(v, &self.plan.criteria),
            }),
        }
        self.visiting.pop();
        Ok(())
    }
}

/// Chooses a model or derivation for every requested variable and the
/// inputs those need, ordered by stage then dependency.
pub fn resolve(plan: &GenerationPlan, snapshot: &RegistrySnapshot) -> Result<Resolution> {
    plan.validate()?;
    let mut r = Resolver {
        plan,
        snapshot,
        done: BTreeMap::new(),
        visiting: Vec::new(),
        unresolved: Vec::new(),
        decisions: Vec::new(),
    };
    let mut wanted = plan.variables.clone();
    if plan.options.sky_temperature && !wanted.contains(&Variable::SkyTemp) {
        wanted.push(Variable::SkyTemp);
    }
    for v in wanted {
        r.need(v)?;
    }
    if !r.unresolved.is_empty() {
        r.unresolved.sort_by_key(|u| u.variable);
        return Err(Error::Unresolved(r.unresolved));
    }

    // Kahn's algorithm, always taking the ready variable of lowest stage
    let mut pending: Vec<Assignment> = r.done.into_values().collect();
    let mut ordered: Vec<Assignment> = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let pos = pending
            .iter()
            .enumerate()
            .filter(|(_, a)| {
                a.inputs
                    .iter()
                    .all(|i| ordered.iter().any(|o| o.variable == *i))
            })
            .min_by_key(|(_, a)| (stage(a.variable), a.variable))
            .map(|(i, _)| i)
            .expect("dependency graph is acyclic after resolution");
        ordered.push(pending.remove(pos));
    }
    Ok(Resolution {
        assignments: ordered,
        decisions: r.decisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::climdata::SiteMeta;
    use crate::distfit::{SaunierParams, WeibullParams};
    use crate::genseq::model::Provenance;
    use chrono::NaiveDate;

    fn at(day: u32) -> chrono::NaiveDateTime {
        NaiveDate::from_ymd_opt(2024, 1, day)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn entry(
        v: Variable,
        months: &[u32],
        cadence: Cadence,
        model: FittedModel,
        day: u32,
    ) -> RegistryEntry {
        RegistryEntry::new(
            v,
            cadence,
            SelectionCriteria::months(months.iter().copied()).unwrap(),
            model,
            Provenance {
                fitted_at: at(day),
                data_start: None,
                data_end: None,
                n: 100,
                diagnostics: serde_json::Value::Null,
                software_version: crate::VERSION.into(),
                notes: vec![],
            },
        )
    }

    fn weibull(k: f64) -> FittedModel {
        FittedModel::Weibull(WeibullParams::new(k, 5.0).unwrap())
    }

    fn plan(vars: Vec<Variable>, cadence: Cadence) -> GenerationPlan {
        GenerationPlan::new(
            SiteMeta::gillot(),
            vars,
            NaiveDate::from_ymd_opt(2001, 8, 1)
                .unwrap()
                .and_hms_opt(0, 0, 0)
                .unwrap(),
            24,
            cadence,
            SelectionCriteria::months([8]).unwrap(),
            7,
        )
    }

    #[test]
    fn empty_registry_lists_every_variable() {
        let p = plan(
            vec![
                Variable::WindSpeed,
                Variable::DryBulbTemp,
                Variable::WetBulbTemp,
            ],
            Cadence::Hourly,
        );
        match resolve(&p, &RegistrySnapshot::default()) {
            Err(Error::Unresolved(u)) => {
                let vars: Vec<Variable> = u.iter().map(|u| u.variable).collect();
                // wet bulb needs temperature and humidity; neither exists
                assert_eq!(
                    vars,
                    vec![
                        Variable::DryBulbTemp,
                        Variable::RelHumidity,
                        Variable::WindSpeed
                    ]
                );
                assert!(u[2].suggestion.contains("fit arma"));
                assert!(u[2].suggestion.contains("--months 8"));
                assert_eq!(u[0].period, "m08");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn newer_fit_wins_a_tie() {
        let old = entry(
            Variable::WindSpeed,
            &[7, 8],
            Cadence::Hourly,
            weibull(1.5),
            1,
        );
        let new = entry(
            Variable::WindSpeed,
            &[8, 9],
            Cadence::Hourly,
            weibull(2.5),
            9,
        );
        let snap = RegistrySnapshot {
            entries: vec![old, new.clone()],
        };
        let r = resolve(&plan(vec![Variable::WindSpeed], Cadence::Hourly), &snap).unwrap();
        assert_eq!(r.assignments[0].source, Source::Model(Box::new(new)));
        assert_eq!(r.decisions.len(), 1);
    }

    #[test]
    fn exact_months_beat_recency_and_month_match_is_required() {
        let exact = entry(Variable::WindSpeed, &[8], Cadence::Hourly, weibull(1.5), 1);
        let wide = entry(
            Variable::WindSpeed,
            &[6, 7, 8],
            Cadence::Hourly,
            weibull(2.5),
            9,
        );
        let other = entry(Variable::WindSpeed, &[1], Cadence::Hourly, weibull(3.0), 20);
        let snap = RegistrySnapshot {
            entries: vec![wide, other.clone(), exact.clone()],
        };
        let r = resolve(&plan(vec![Variable::WindSpeed], Cadence::Hourly), &snap).unwrap();
        assert_eq!(r.assignments[0].source, Source::Model(Box::new(exact)));

        let snap = RegistrySnapshot {
            entries: vec![other],
        };
        assert!(resolve(&plan(vec![Variable::WindSpeed], Cadence::Hourly), &snap).is_err());
    }

    #[test]
    fn beam_pulls_in_global_and_kt_in_stage_order() {
        let kt = entry(
            Variable::ClearnessIndex,
            &[8],
            Cadence::Daily,
            FittedModel::Saunier(SaunierParams::from_gamma(2.0, 0.8).unwrap()),
            1,
        );
        let snap = RegistrySnapshot { entries: vec![kt] };
        let p = plan(
            vec![Variable::GlobalRad, Variable::Pressure],
            Cadence::Hourly,
        );
        let r = resolve(&p, &snap).unwrap();
        let order: Vec<Variable> = r.assignments.iter().map(|a| a.variable).collect();
        assert_eq!(
            order,
            vec![
                Variable::ClearnessIndex,
                Variable::GlobalRad,
                Variable::Pressure
            ]
        );
        assert_eq!(
            r.assignments[2].source,
            Source::Derived(Derivation::StandardPressure)
        );

        let p = plan(vec![Variable::BeamRad], Cadence::Hourly);
        match resolve(&p, &snap) {
            Err(Error::Unresolved(u)) => assert_eq!(u[0].variable, Variable::DiffuseRad),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn override_must_exist() {
        let mut p = plan(vec![Variable::WindSpeed], Cadence::Hourly);
        p.overrides.insert(Variable::WindSpeed, "nope.json".into());
        assert!(matches!(
            resolve(&p, &RegistrySnapshot::default()),
            Err(Error::InvalidInput(_))
        ));
    }
}
