use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ClimateSeries, Variable};
use crate::{stats, Error, Result};

/// Descriptive statistics over the non-missing values of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n-1). Reported as 0 when `count < 2`.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub missing_count: usize,
    /// Set when fewer than two values make `std` undefined.
    pub degenerate: bool,
}

pub fn describe(series: &ClimateSeries) -> Result<Summary> {
    let values = series.present();
    if values.is_empty() {
        return Err(Error::NoData);
    }
    Ok(Summary {
        mean: stats::mean(&values),
        std: stats::std_dev(&values),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count: values.len(),
        missing_count: series.missing_count(),
        degenerate: values.len() < 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    /// Bin covers `[lower_edge, lower_edge + bin_width)`.
    pub lower_edge: f64,
    pub count: usize,
    pub hours: f64,
}

/// Bin data: hours spent in each value interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinTable {
    pub variable: Variable,
    pub bin_width: f64,
    /// Non-empty bins in increasing order.
    pub bins: Vec<Bin>,
}

impl BinTable {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lower_edge,upper_edge,count,hours\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{}\n",
                b.lower_edge,
                b.lower_edge + self.bin_width,
                b.count,
                b.hours
            ));
        }
        out
    }
}

/// Histogram anchored at `floor(min / width) * width`.
pub fn bin_data(series: &ClimateSeries, bin_width: f64) -> Result<BinTable> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::invalid(format!(
            "bin width {bin_width} must be positive"
        )));
    }
    let values = series.present();
    if values.is_empty() {
        return Err(Error::NoData);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let anchor = (min / bin_width).floor() * bin_width;
    let edge = |i: i64| anchor + i as f64 * bin_width;

    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        let mut i = ((v - anchor) / bin_width).floor() as i64;
        // float division can land one bin off near an edge
        while edge(i) > v {
            i -= 1;
        }
        while edge(i + 1) <= v {
            i += 1;
        }
        *counts.entry(i).or_default() += 1;
    }
    let hours = series.cadence().hours();
    Ok(BinTable {
        variable: series.variable(),
        bin_width,
        bins: counts
            .into_iter()
            .map(|(i, count)| Bin {
                lower_edge: edge(i),
                count,
                hours: count as f64 * hours,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::climdata::Cadence;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn series(values: Vec<Option<f64>>) -> ClimateSeries {
        let start = NaiveDate::from_ymd_opt(2001, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        ClimateSeries::regular(Variable::DryBulbTemp, Cadence::Hourly, start, values).unwrap()
    }

    #[test]
    fn describe_one_two_three() {
        let s = describe(&series(vec![Some(1.0), Some(2.0), Some(3.0)])).unwrap();
        assert_eq!((s.mean, s.std, s.min, s.max), (2.0, 1.0, 1.0, 3.0));
        assert!(!s.degenerate);
    }

    #[test]
    fn describe_singleton_flags_degenerate() {
        let s = describe(&series(vec![Some(5.0)])).unwrap();
        assert_eq!((s.mean, s.std, s.count), (5.0, 0.0, 1));
        assert!(s.degenerate);
    }

    #[test]
    fn describe_skips_missing() {
        let s = describe(&series(vec![Some(1.0), None, Some(3.0)])).unwrap();
        assert_eq!((s.count, s.missing_count, s.mean), (2, 1, 2.0));
    }

    #[test]
    fn describe_all_missing_is_no_data() {
        assert!(matches!(
            describe(&series(vec![None, None])),
            Err(Error::NoData)
        ));
    }

    #[test]
    fn bins_hand_count() {
        let t = bin_data(&series(vec![Some(1.2), Some(3.4), Some(3.6)]), 1.0).unwrap();
        let got: Vec<(f64, usize)> = t.bins.iter().map(|b| (b.lower_edge, b.count)).collect();
        assert_eq!(got, vec![(1.0, 1), (3.0, 2)]);
    }

    #[test]
    fn singleton_bin() {
        let t = bin_data(&series(vec![Some(5.0)]), 2.0).unwrap();
        assert_eq!(
            t.bins,
            vec![Bin {
                lower_edge: 4.0,
                count: 1,
                hours: 1.0
            }]
        );
    }

    #[test]
    fn hours_follow_cadence() {
        let t = bin_data(&series(vec![Some(0.5); 10]), 1.0).unwrap();
        assert_eq!(t.bins[0].hours, 10.0);
        let start = NaiveDate::from_ymd_opt(2001, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let daily =
            ClimateSeries::from_values(Variable::WindSpeed, Cadence::Daily, start, &[0.5, 0.7])
                .unwrap();
        assert_eq!(bin_data(&daily, 1.0).unwrap().bins[0].hours, 48.0);
    }

    #[test]
    fn bad_width_and_empty() {
        assert!(bin_data(&series(vec![Some(1.0)]), 0.0).is_err());
        assert!(bin_data(&series(vec![None]), 1.0).is_err());
    }

    proptest! {
        #[test]
        fn bin_counts_sum_to_present(values in proptest::collection::vec(proptest::option::weighted(0.8, -50.0f64..50.0), 1..200), width in 0.01f64..20.0) {
            prop_assume!(values.iter().any(|v| v.is_some()));
            let s = series(values);
            let t = bin_data(&s, width).unwrap();
            prop_assert_eq!(t.total_count(), s.present().len());
            for b in &t.bins {
                prop_assert!(b.count > 0);
            }
        }
    }
}
