//! Statistical comparison of generated sequences with measured data.

use std::fmt::Write as _;

use chrono::{Datelike, NaiveDateTime};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::climdata::{bin_data, Cadence, ClimateSeries, SiteMeta, Variable, WeatherTable};
use crate::genseq::{enforce_coherence, CoherenceReport};
use crate::solargeo::SolarCalendar;
use crate::stats::{mean, quantile, std_dev};
use crate::{Error, Result};

/// Smallest sample accepted by [`ks_two_sample`].
pub const KS_MIN_SAMPLE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    pub critical: f64,
    pub alpha: f64,
    pub pass: bool,
    pub n: usize,
    pub m: usize,
}

/// Asymptotic coefficient `c(α) = √(−½ ln(α/2))`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

/// Asymptotic two-sample critical value for sizes `n` and `m`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// Largest distance between the two empirical CDFs, by a merge scan over
/// both sorted samples. Tied values are consumed together on both sides.
pub fn ks_statistic(x: &[f64], y: &[f64]) -> f64 {
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Two-sided two-sample Kolmogorov-Smirnov test with asymptotic critical
/// values.
pub fn ks_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<KsResult> {
    if x.len() < KS_MIN_SAMPLE || y.len() < KS_MIN_SAMPLE {
        return Err(Error::invalid(format!(
            "KS test needs at least {KS_MIN_SAMPLE} values per sample, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0, 1)")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("KS samples must be finite"));
    }
    let d = ks_statistic(x, y);
    let critical = ks_critical(x.len(), y.len(), alpha);
    Ok(KsResult {
        d,
        critical,
        alpha,
        pass: d <= critical,
        n: x.len(),
        m: y.len(),
    })
}

/// Monthly tolerances in units of the reference standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthlyTolerance {
    pub mean_sigma: f64,
    pub std_sigma: f64,
}

impl Default for MonthlyTolerance {
    fn default() -> Self {
        MonthlyTolerance {
            mean_sigma: 0.25,
            std_sigma: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthRow {
    pub month: u32,
    pub generated_mean: f64,
    pub generated_std: f64,
    pub reference_mean: f64,
    pub reference_std: f64,
    /// Generated minus reference.
    pub delta_mean: f64,
    pub delta_std: f64,
    pub tol_mean: f64,
    pub tol_std: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyComparison {
    pub months: Vec<MonthRow>,
    /// Generated months with no reference data.
    pub skipped: Vec<u32>,
    pub pass: bool,
}

fn by_month(s: &ClimateSeries) -> [Vec<f64>; 12] {
    let mut out: [Vec<f64>; 12] = Default::default();
    for (t, v) in s.iter() {
        if let Some(v) = v {
            out[t.month0() as usize].push(v);
        }
    }
    out
}

/// Per-month mean and standard-deviation deltas.
pub fn compare_monthly(
    generated: &ClimateSeries,
    reference: &ClimateSeries,
    tol: MonthlyTolerance,
) -> MonthlyComparison {
    let g = by_month(generated);
    let r = by_month(reference);
    let mut months = Vec::new();
    let mut skipped = Vec::new();
    for m in 0..12 {
        if g[m].is_empty() {
            continue;
        }
        if r[m].is_empty() {
            skipped.push(m as u32 + 1);
            continue;
        }
        let (gm, gs) = (mean(&g[m]), std_dev(&g[m]));
        let (rm, rs) = (mean(&r[m]), std_dev(&r[m]));
        let (dm, ds) = (gm - rm, gs - rs);
        let (tm, ts) = (tol.mean_sigma * rs, tol.std_sigma * rs);
        let slack = 1e-12 * rm.abs().max(1.0);
        months.push(MonthRow {
            month: m as u32 + 1,
            generated_mean: gm,
            generated_std: gs,
            reference_mean: rm,
            reference_std: rs,
            delta_mean: dm,
            delta_std: ds,
            tol_mean: tm,
            tol_std: ts,
            pass: dm.abs() <= tm + slack && ds.abs() <= ts + slack,
        });
    }
    let pass = months.iter().all(|m| m.pass);
    MonthlyComparison {
        months,
        skipped,
        pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsolationCheck {
    pub violations: usize,
    pub first: Option<NaiveDateTime>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremesCheck {
    pub generated_min: f64,
    pub generated_max: f64,
    pub reference_min: f64,
    pub reference_max: f64,
    pub margin: f64,
    pub range_pass: bool,
    /// First generated value outside the widened reference range.
    pub offending: Option<(NaiveDateTime, f64)>,
    pub reference_p99: f64,
    pub reference_exceedance: f64,
    pub generated_exceedance: f64,
    pub frequency_pass: bool,
    /// Only for insolation, and only with a site.
    pub insolation: Option<InsolationCheck>,
    pub pass: bool,
}

/// Range, tail-frequency and (for insolation) day-length checks.
///
/// The generated share of values above the reference 99th percentile may
/// not exceed twice the reference share, unless a binomial draw at the
/// reference share would reach that count with probability above 1 %; the
/// lower bound (half the reference share) is checked only when at least
/// ten exceedances are expected.
pub fn check_extremes(
    generated: &ClimateSeries,
    reference: &ClimateSeries,
    site: Option<&SiteMeta>,
) -> Result<ExtremesCheck> {
    let g = generated.present();
    let r = reference.present();
    if g.is_empty() || r.is_empty() {
        return Err(Error::NoData);
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (rmin, rmax) = (min(&r), max(&r));
    let margin = 0.1 * (rmax - rmin);
    let offending = generated.iter().find_map(|(t, v)| {
        v.filter(|x| *x < rmin - margin || *x > rmax + margin)
            .map(|x| (t, x))
    });

    let p99 = quantile(&r, 0.99);
    let ref_freq = r.iter().filter(|x| **x > p99).count() as f64 / r.len() as f64;
    let k = g.iter().filter(|x| **x > p99).count();
    let gen_freq = k as f64 / g.len() as f64;
    let expected = ref_freq * g.len() as f64;
    let upper_ok = gen_freq <= 2.0 * ref_freq
        || (ref_freq > 0.0 && {
            let b = Binomial::new(ref_freq, g.len() as u64).expect("valid binomial");
            1.0 - b.cdf(k as u64 - 1) > 0.01
        });
    let lower_ok = expected < 10.0 || gen_freq >= 0.5 * ref_freq;

    let insolation = match (generated.variable(), site) {
        (Variable::InsolationHours, Some(site)) => {
            let mut cal = SolarCalendar::new(site);
            let mut violations = 0;
            let mut first = None;
            for (t, v) in generated.iter() {
                let Some(v) = v else { continue };
                let bound = match generated.cadence() {
                    Cadence::Daily => cal.day(t.date()).day_length,
                    Cadence::Hourly => 1.0,
                };
                if v > bound + 1e-9 {
                    violations += 1;
                    first.get_or_insert(t);
                }
            }
            Some(InsolationCheck {
                violations,
                first,
                pass: violations == 0,
            })
        }
        _ => None,
    };

    let range_pass = offending.is_none();
    let frequency_pass = upper_ok && lower_ok;
    let pass = range_pass && frequency_pass && insolation.as_ref().is_none_or(|i| i.pass);
    Ok(ExtremesCheck {
        generated_min: min(&g),
        generated_max: max(&g),
        reference_min: rmin,
        reference_max: rmax,
        margin,
        range_pass,
        offending,
        reference_p99: p99,
        reference_exceedance: ref_freq,
        generated_exceedance: gen_freq,
        frequency_pass,
        insolation,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwbCheck {
    pub rows_checked: usize,
    pub violations: usize,
    pub first_violation: Option<usize>,
    pub pass: bool,
}

/// Every row with both temperatures must satisfy wet bulb ≤ dry bulb + 1e-6.
pub fn check_twb_tdb(table: &WeatherTable) -> Result<TwbCheck> {
    let (Some(db), Some(wb)) = (
        table.column(Variable::DryBulbTemp),
        table.column(Variable::WetBulbTemp),
    ) else {
        return Err(Error::invalid(
            "wet/dry bulb check needs both temperature columns",
        ));
    };
    let mut rows_checked = 0;
    let mut violations = 0;
    let mut first_violation = None;
    for (i, (d, w)) in db.iter().zip(wb).enumerate() {
        if let (Some(d), Some(w)) = (d, w) {
            rows_checked += 1;
            if *w > d + 1e-6 {
                violations += 1;
                first_violation.get_or_insert(i);
            }
        }
    }
    Ok(TwbCheck {
        rows_checked,
        violations,
        first_violation,
        pass: violations == 0,
    })
}

/// Externally computed indicator, such as a simulated indoor temperature,
/// for the generated and the measured weather.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub name: String,
    pub generated: Vec<f64>,
    pub reference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub alpha: f64,
    pub tolerance: MonthlyTolerance,
    /// Enables the night rule of the coherence audit and the insolation bound.
    pub site: Option<SiteMeta>,
    pub indicators: Vec<Indicator>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            alpha: 0.05,
            tolerance: MonthlyTolerance::default(),
            site: None,
            indicators: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub lower_edge: f64,
    pub generated_share: f64,
    pub reference_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableReport {
    pub variable: Variable,
    pub ks: KsResult,
    pub monthly: MonthlyComparison,
    pub extremes: ExtremesCheck,
    /// Occurrence frequencies per bin; informative only.
    pub frequencies: Vec<FrequencyRow>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub name: String,
    pub ks: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub alpha: f64,
    pub variables: Vec<VariableReport>,
    pub twb_tdb: Option<TwbCheck>,
    /// Repairs the generated table would still need; must be zero.
    pub coherence: CoherenceReport,
    pub indicators: Vec<IndicatorReport>,
    pub pass: bool,
}

/// Default histogram width for occurrence frequencies.
pub fn default_bin_width(v: Variable) -> f64 {
    match v {
        Variable::DryBulbTemp | Variable::WetBulbTemp | Variable::SkyTemp => 1.0,
        Variable::RelHumidity => 5.0,
        Variable::WindSpeed | Variable::InsolationHours | Variable::Nebulosity => 1.0,
        Variable::WindDirection => 30.0,
        Variable::GlobalRad | Variable::DiffuseRad | Variable::BeamRad => 50.0,
        Variable::Pressure => 2.0,
        Variable::ClearnessIndex => 0.05,
        Variable::SolarHeight => 10.0,
    }
}

fn frequencies(g: &ClimateSeries, r: &ClimateSeries) -> Result<Vec<FrequencyRow>> {
    let w = default_bin_width(g.variable());
    let gb = bin_data(g, w)?;
    let rb = bin_data(r, w)?;
    let (gn, rn) = (gb.total_count() as f64, rb.total_count() as f64);
    let key = |e: f64| (e / w).round() as i64;
    let mut rows: std::collections::BTreeMap<i64, FrequencyRow> = Default::default();
    for b in &gb.bins {
        rows.entry(key(b.lower_edge))
            .or_insert(FrequencyRow {
                lower_edge: b.lower_edge,
                generated_share: 0.0,
                reference_share: 0.0,
            })
            .generated_share = b.count as f64 / gn;
    }
    for b in &rb.bins {
        rows.entry(key(b.lower_edge))
            .or_insert(FrequencyRow {
                lower_edge: b.lower_edge,
                generated_share: 0.0,
                reference_share: 0.0,
            })
            .reference_share = b.count as f64 / rn;
    }
    Ok(rows.into_values().collect())
}

/// Runs every check on the variables both tables share.
pub fn full_report(
    generated: &WeatherTable,
    reference: &WeatherTable,
    options: &ValidateOptions,
) -> Result<ValidationReport> {
    let common: Vec<Variable> = generated
        .variables()
        .into_iter()
        .filter(|v| reference.has(*v))
        .collect();
    if common.is_empty() {
        return Err(Error::invalid(
            "generated and reference data share no variable",
        ));
    }
    let mut variables = Vec::with_capacity(common.len());
    for v in common {
        let g = generated.series(v)?;
        let r = reference.series(v)?;
        let ks = ks_two_sample(&g.present(), &r.present(), options.alpha)?;
        let monthly = compare_monthly(&g, &r, options.tolerance);
        let extremes = check_extremes(&g, &r, options.site.as_ref())?;
        let pass = ks.pass && monthly.pass && extremes.pass;
        variables.push(VariableReport {
            variable: v,
            ks,
            monthly,
            extremes,
            frequencies: frequencies(&g, &r)?,
            pass,
        });
    }
    let twb_tdb = if generated.has(Variable::DryBulbTemp) && generated.has(Variable::WetBulbTemp) {
        Some(check_twb_tdb(generated)?)
    } else {
        None
    };
    let coherence = enforce_coherence(&mut generated.clone(), options.site.as_ref());
    let indicators = options
        .indicators
        .iter()
        .map(|i| {
            Ok(IndicatorReport {
                name: i.name.clone(),
                ks: ks_two_sample(&i.generated, &i.reference, options.alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = variables.iter().all(|v| v.pass)
        && twb_tdb.as_ref().is_none_or(|t| t.pass)
        && coherence.total() == 0
        && indicators.iter().all(|i| i.ks.pass);
    Ok(ValidationReport {
        alpha: options.alpha,
        variables,
        twb_tdb,
        coherence,
        indicators,
        pass,
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

impl ValidationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "validation at alpha = {}: {}",
            self.alpha,
            verdict(self.pass)
        );
        for v in &self.variables {
            let _ = writeln!(s, "{} {}", verdict(v.pass), v.variable);
            let _ = writeln!(
                s,
                "  KS        D = {:.4}  critical = {:.4}  (n = {}, m = {})  {}",
                v.ks.d,
                v.ks.critical,
                v.ks.n,
                v.ks.m,
                verdict(v.ks.pass)
            );
            for m in &v.monthly.months {
                let _ = writeln!(
                    s,
                    "  month {:2}  dmean = {:+.3} (tol {:.3})  dstd = {:+.3} (tol {:.3})  {}",
                    m.month,
                    m.delta_mean,
                    m.tol_mean,
                    m.delta_std,
                    m.tol_std,
                    verdict(m.pass)
                );
            }
            for m in &v.monthly.skipped {
                let _ = writeln!(s, "  month {m:2}  skipped: no reference data");
            }
            let e = &v.extremes;
            let _ = writeln!(
                s,
                "  extremes  [{:.3}, {:.3}] vs [{:.3}, {:.3}] +/- {:.3}  {}",
                e.generated_min,
                e.generated_max,
                e.reference_min,
                e.reference_max,
                e.margin,
                verdict(e.range_pass)
            );
            if let Some((t, x)) = e.offending {
                let _ = writeln!(s, "            first offending value {x} at {t}");
            }
            let _ = writeln!(
                s,
                "  tail      above p99 {:.3}: {:.4} vs {:.4}  {}",
                e.reference_p99,
                e.generated_exceedance,
                e.reference_exceedance,
                verdict(e.frequency_pass)
            );
            if let Some(i) = &e.insolation {
                let _ = writeln!(
                    s,
                    "  day length bound: {} violation(s)  {}",
                    i.violations,
                    verdict(i.pass)
                );
            }
        }
        if let Some(t) = &self.twb_tdb {
            let _ = writeln!(
                s,
                "{} wet bulb <= dry bulb on {} rows{}",
                verdict(t.pass),
                t.rows_checked,
                t.first_violation
                    .map(|i| format!(", first violation at row {i}"))
                    .unwrap_or_default()
            );
        }
        let _ = writeln!(
            s,
            "{} coherence audit: {} repair(s) needed",
            verdict(self.coherence.total() == 0),
            self.coherence.total()
        );
        for i in &self.indicators {
            let _ = writeln!(
                s,
                "{} indicator {}: D = {:.4} critical = {:.4}",
                verdict(i.ks.pass),
                i.name,
                i.ks.d,
                i.ks.critical
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::rng;
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Brute force: sup over every pooled point of |Fx − Fy|, each ECDF
    /// counted directly.
    fn brute_d(x: &[f64], y: &[f64]) -> f64 {
        let ecdf =
            |s: &[f64], t: f64| s.iter().filter(|v| **v <= t).count() as f64 / s.len() as f64;
        x.iter()
            .chain(y)
            .map(|t| (ecdf(x, *t) - ecdf(y, *t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn merge_scan_matches_brute_force() {
        let mut r = rng(11);
        for _ in 0..1000 {
            let n = r.random_range(1..15);
            let m = r.random_range(1..15);
            // small integer support forces ties
            let x: Vec<f64> = (0..n).map(|_| r.random_range(0..6) as f64).collect();
            let y: Vec<f64> = (0..m).map(|_| r.random_range(0..6) as f64).collect();
            assert_eq!(ks_statistic(&x, &y), brute_d(&x, &y));
            assert_eq!(ks_statistic(&x, &y), ks_statistic(&y, &x));
        }
    }

    #[test]
    fn ks_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(ks_two_sample(&x, &x, 0.05).unwrap().d, 0.0);
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 1.0);
        assert!(ks_two_sample(&[1.0, 2.0, 3.0], &x, 0.05).is_err());
        // c(0.05)·√0.02 with c from the asymptotic formula
        assert!((ks_critical(100, 100, 0.05) - 0.19206).abs() < 1e-4);
        assert!((ks_coefficient(0.05) - 1.358).abs() < 1e-3);
        assert!((ks_coefficient(0.01) - 1.628).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn d_is_bounded_and_symmetric(
            x in proptest::collection::vec(-10.0..10.0f64, 1..40),
            y in proptest::collection::vec(-10.0..10.0f64, 1..40),
        ) {
            let d = ks_statistic(&x, &y);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, ks_statistic(&y, &x));
            let mut xs = x.clone();
            xs.reverse();
            prop_assert_eq!(ks_statistic(&x, &xs), 0.0);
        }
    }

    fn day(i: i64) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
            + chrono::Duration::days(i)
    }

    fn daily(v: Variable, values: &[f64]) -> ClimateSeries {
        ClimateSeries::from_values(v, Cadence::Daily, day(0), values).unwrap()
    }

    #[test]
    fn monthly_hand_example() {
        // four alternating values m ± a have n−1 std a·√(4/3)
        let half = |m: f64, sd: f64| {
            let a = sd * (3.0f64 / 4.0).sqrt();
            vec![m - a, m + a, m - a, m + a]
        };
        let r = daily(Variable::DryBulbTemp, &half(20.0, 2.0));
        let g = daily(Variable::DryBulbTemp, &half(20.4, 2.1));
        let c = compare_monthly(&g, &r, MonthlyTolerance::default());
        let row = &c.months[0];
        assert_eq!(row.month, 8);
        assert!((row.reference_std - 2.0).abs() < 1e-12);
        assert!((row.delta_mean - 0.4).abs() < 1e-12);
        assert!((row.delta_std - 0.1).abs() < 1e-12);
        assert!((row.tol_mean - 0.5).abs() < 1e-12);
        assert!(row.pass);
    }

    #[test]
    fn monthly_shift_by_one_sigma_fails() {
        let vals: Vec<f64> = (0..31)
            .map(|i| (i as f64 * 0.7).sin() * 3.0 + 20.0)
            .collect();
        let r = daily(Variable::DryBulbTemp, &vals);
        assert!(compare_monthly(&r, &r, MonthlyTolerance::default()).pass);
        let s = std_dev(&vals);
        let shifted: Vec<f64> = vals.iter().map(|v| v + s).collect();
        let c = compare_monthly(
            &daily(Variable::DryBulbTemp, &shifted),
            &r,
            MonthlyTolerance::default(),
        );
        assert!(!c.pass);
        assert!((c.months[0].delta_mean - s).abs() < 1e-9);
    }

    #[test]
    fn extremes_flag_the_offending_timestamp() {
        let r = daily(
            Variable::WindSpeed,
            &(0..31).map(|i| i as f64 / 3.0).collect::<Vec<_>>(),
        );
        let inside = daily(Variable::WindSpeed, &[1.0, 2.0, 3.0]);
        assert!(check_extremes(&inside, &r, None).unwrap().range_pass);
        let range = 10.0;
        let g = daily(Variable::WindSpeed, &[1.0, 10.0 + 0.5 * range, 2.0]);
        let e = check_extremes(&g, &r, None).unwrap();
        assert!(!e.pass);
        assert_eq!(e.offending, Some((day(1), 15.0)));
    }

    #[test]
    fn insolation_above_day_length_fails() {
        let site = SiteMeta::new("eq", 0.0, 0.0, 0.0, 0.0).unwrap();
        let s0 = SolarCalendar::new(&site).day(day(0).date()).day_length;
        assert!((s0 - 12.0).abs() < 0.2);
        let r = daily(Variable::InsolationHours, &[5.0, 8.0, 10.0, 11.0, 13.0]);
        let g = daily(Variable::InsolationHours, &[5.0, 13.0, 10.0]);
        let e = check_extremes(&g, &r, Some(&site)).unwrap();
        let ins = e.insolation.unwrap();
        assert_eq!(ins.violations, 1);
        assert_eq!(ins.first, Some(day(1)));
        assert!(!e.pass);
    }

    fn twb_table(db: &[f64], wb: &[f64]) -> WeatherTable {
        let mut t = WeatherTable::new(Cadence::Daily, (0..db.len() as i64).map(day).collect());
        t.insert(Variable::DryBulbTemp, db.iter().map(|v| Some(*v)).collect())
            .unwrap();
        t.insert(Variable::WetBulbTemp, wb.iter().map(|v| Some(*v)).collect())
            .unwrap();
        t
    }

    #[test]
    fn twb_check() {
        assert!(
            check_twb_tdb(&twb_table(&[25.0, 20.0], &[20.0, 20.0]))
                .unwrap()
                .pass
        );
        let c = check_twb_tdb(&twb_table(&[25.0, 20.0, 18.0], &[20.0, 21.0, 19.0])).unwrap();
        assert!(!c.pass);
        assert_eq!(c.first_violation, Some(1));
        assert_eq!(c.violations, 2);
    }

    fn reference(seed: u64, n: usize) -> WeatherTable {
        let mut r = rng(seed);
        let t0 = NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let ts: Vec<NaiveDateTime> = (0..n as i64)
            .map(|h| t0 + chrono::Duration::hours(h))
            .collect();
        let mut t = WeatherTable::new(Cadence::Hourly, ts);
        let temp: Vec<Option<f64>> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut r);
                Some(25.0 + 2.0 * z)
            })
            .collect();
        t.insert(Variable::DryBulbTemp, temp).unwrap();
        t
    }

    #[test]
    fn identical_inputs_pass_and_no_common_variable_errors() {
        let r = reference(1, 300);
        let rep = full_report(&r, &r, &ValidateOptions::default()).unwrap();
        assert!(rep.pass, "{}", rep.to_text());
        assert!(rep.to_json().unwrap().contains("\"pass\": true"));
        let mut other = WeatherTable::new(r.cadence, r.timestamps.clone());
        other
            .insert(Variable::WindSpeed, vec![Some(1.0); r.len()])
            .unwrap();
        assert!(full_report(&other, &r, &ValidateOptions::default()).is_err());
    }

    #[test]
    fn shifted_generation_fails() {
        let r = reference(2, 500);
        let mut g = r.clone();
        for v in g
            .columns
            .get_mut(&Variable::DryBulbTemp)
            .unwrap()
            .iter_mut()
        {
            *v = v.map(|x| x + 2.0);
        }
        assert!(
            !full_report(&g, &r, &ValidateOptions::default())
                .unwrap()
                .pass
        );
    }

    #[test]
    fn bootstrap_resamples_pass() {
        let r = reference(3, 500);
        let col = r.column(Variable::DryBulbTemp).unwrap().to_vec();
        let mut passes = 0;
        for seed in 0..100 {
            let mut rr = rng(1000 + seed);
            let resampled: Vec<Option<f64>> = (0..col.len())
                .map(|_| col[rr.random_range(0..col.len())])
                .collect();
            let mut g = r.clone();
            g.insert(Variable::DryBulbTemp, resampled).unwrap();
            if full_report(&g, &r, &ValidateOptions::default())
                .unwrap()
                .pass
            {
                passes += 1;
            }
        }
        assert!(passes >= 90, "{passes}/100");
    }

    #[test]
    fn indicator_hook_runs_ks() {
        let r = reference(4, 100);
        let opts = ValidateOptions {
            indicators: vec![Indicator {
                name: "indoor".into(),
                generated: (0..50).map(|i| i as f64).collect(),
                reference: (0..50).map(|i| i as f64 + 100.0).collect(),
            }],
            ..ValidateOptions::default()
        };
        let rep = full_report(&r, &r, &opts).unwrap();
        assert_eq!(rep.indicators[0].ks.d, 1.0);
        assert!(!rep.pass);
    }
}
