mod common;

use chrono::{Datelike, Timelike};
use common::{at, hourly_plan, hourly_registry};
use weathergen::genseq::{generate, generate_batch, to_csv_string};
use weathergen::Error;

#[test]
fn two_days_of_hourly_rows() {
    let dir = tempfile::tempdir().unwrap();
    let snap = hourly_registry(dir.path()).snapshot().unwrap();
    let seq = generate(&hourly_plan(48, 1), &snap).unwrap();
    assert_eq!(seq.table.len(), 48);
    assert_eq!(seq.table.timestamps[47].hour(), 23);
    assert_eq!(seq.provenance.coherence.total(), 0);
    assert_eq!(seq.provenance.models.len(), 3);
}

#[test]
fn same_plan_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let snap = hourly_registry(dir.path()).snapshot().unwrap();
    let a = to_csv_string(&generate(&hourly_plan(48, 9), &snap).unwrap()).unwrap();
    let b = to_csv_string(&generate(&hourly_plan(48, 9), &snap).unwrap()).unwrap();
    let c = to_csv_string(&generate(&hourly_plan(48, 10), &snap).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn timeline_skips_months_outside_the_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let snap = hourly_registry(dir.path()).snapshot().unwrap();
    let mut plan = hourly_plan(72, 3);
    plan.start = at(2010, 7, 31, 12);
    let seq = generate(&plan, &snap).unwrap();
    assert_eq!(seq.table.len(), 72);
    assert!(seq.table.timestamps.iter().all(|t| t.month() == 8));
    assert_eq!(seq.table.timestamps[0], at(2010, 8, 1, 0));
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let snap = hourly_registry(dir.path()).snapshot().unwrap();
    let plans: Vec<_> = (0..6).map(|s| hourly_plan(24, s)).collect();
    let batch = generate_batch(&plans, &snap);
    for (plan, got) in plans.iter().zip(batch) {
        let single = generate(plan, &snap).unwrap();
        assert_eq!(got.unwrap().table, single.table);
    }
}

#[test]
fn missing_model_is_reported_with_a_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let snap = weathergen::genseq::ModelRegistry::open(dir.path())
        .unwrap()
        .snapshot()
        .unwrap();
    match generate(&hourly_plan(24, 1), &snap) {
        Err(Error::Unresolved(items)) => {
            assert_eq!(items.len(), 3);
            assert!(items
                .iter()
                .all(|u| u.suggestion.starts_with("weathergen fit")));
        }
        other => panic!("expected unresolved variables, got {other:?}"),
    }
}
