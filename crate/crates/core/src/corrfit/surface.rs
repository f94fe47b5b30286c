use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::CorrelationModel;
use crate::climdata::Variable;
use crate::{Error, Result};

/// Bin edges along one predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub variable: Variable,
    pub edges: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCell {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub count: usize,
    /// Mean of `100·(observed − predicted)/|observed|`; `None` when the
    /// cell holds no usable observation.
    pub mean_rel_error_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSurface {
    pub axes: Vec<GridAxis>,
    pub cells: Vec<ErrorCell>,
}

impl ErrorSurface {
    /// One row per cell: lower and upper edge per axis, count, relative
    /// error in percent (empty when missing).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for a in &self.axes {
            let _ = write!(out, "{0}_lo,{0}_hi,", a.variable);
        }
        out.push_str("count,rel_error_pct\n");
        for c in &self.cells {
            for (lo, hi) in c.lower.iter().zip(&c.upper) {
                let _ = write!(out, "{lo},{hi},");
            }
            let _ = write!(out, "{},", c.count);
            if let Some(e) = c.mean_rel_error_pct {
                let _ = write!(out, "{e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Mean relative error of `model` on its own fitting data, per cell of the
/// grid spanned by `axes`. Cells are half-open `[lo, hi)`; observations
/// outside the grid or with a zero response are left out.
pub fn error_surface(model: &CorrelationModel, axes: &[GridAxis]) -> Result<ErrorSurface> {
    if axes.is_empty() {
        return Err(Error::invalid("error surface needs at least one axis"));
    }
    let mut index = Vec::with_capacity(axes.len());
    for a in axes {
        if a.edges.len() < 2 || a.edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(format!(
                "axis {} needs at least two increasing edges",
                a.variable
            )));
        }
        let k = model
            .predictors
            .iter()
            .position(|p| *p == a.variable)
            .ok_or_else(|| {
                Error::invalid(format!("{} is not a predictor of the model", a.variable))
            })?;
        index.push(k);
    }
    let shape: Vec<usize> = axes.iter().map(|a| a.edges.len() - 1).collect();
    let total: usize = shape.iter().product();
    let mut sums = vec![0.0; total];
    let mut counts = vec![0usize; total];

    'obs: for (x, y) in model.inputs.iter().zip(&model.observed) {
        if *y == 0.0 {
            continue;
        }
        let mut flat = 0;
        for (a, &k) in axes.iter().zip(&index) {
            let v = x[k];
            let e = &a.edges;
            if v < e[0] || v >= e[e.len() - 1] {
                continue 'obs;
            }
            let bin = e.partition_point(|edge| *edge <= v) - 1;
            flat = flat * (e.len() - 1) + bin;
        }
        let pred = model.evaluate(x)?;
        sums[flat] += 100.0 * (y - pred) / y.abs();
        counts[flat] += 1;
    }

    let mut cells = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut pos = vec![0; axes.len()];
        for d in (0..axes.len()).rev() {
            pos[d] = rem % shape[d];
            rem /= shape[d];
        }
        cells.push(ErrorCell {
            lower: axes.iter().zip(&pos).map(|(a, i)| a.edges[*i]).collect(),
            upper: axes
                .iter()
                .zip(&pos)
                .map(|(a, i)| a.edges[*i + 1])
                .collect(),
            count: counts[flat],
            mean_rel_error_pct: (counts[flat] > 0).then(|| sums[flat] / counts[flat] as f64),
        });
    }
    Ok(ErrorSurface {
        axes: axes.to_vec(),
        cells,
    })
}
