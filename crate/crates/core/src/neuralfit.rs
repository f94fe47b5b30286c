//! One-hidden-layer regression networks trained by Levenberg-Marquardt.
//!
//! Inputs and output are standardized inside the model. The hidden layer
//! uses `tanh`, the output is linear. With `n_hidden = 0` the network is a
//! plain affine map of the inputs.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::climdata::{select_rows, ClimateSeries, SelectionCriteria, Variable};
use crate::{stats, Error, Result};

pub const DEFAULT_HIDDEN: usize = 3;
pub const LAMBDA_LIMIT: f64 = 1e10;

/// `(v − mean) / std`; a vanishing std is stored as 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: f64,
    pub std: f64,
}

impl Scaler {
    pub const IDENTITY: Scaler = Scaler {
        mean: 0.0,
        std: 1.0,
    };

    pub fn fit(values: &[f64]) -> Self {
        let mean = stats::mean(values);
        let std = if values.len() > 1 {
            stats::std_dev(values)
        } else {
            0.0
        };
        Self {
            mean,
            std: if std < 1e-12 { 1.0 } else { std },
        }
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        self.mean + self.std * z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    SmallStep,
    SmallImprovement,
    LambdaLimit,
    ConstantTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    /// eqm in output units: the initial value, then one entry per accepted
    /// step.
    pub eqm_history: Vec<f64>,
    pub final_lambda: f64,
    pub iterations: usize,
    pub stop: StopReason,
    /// Fewer than 10 samples per parameter.
    pub small_sample: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralModel {
    pub inputs: Vec<Variable>,
    pub response: Option<Variable>,
    pub n_hidden: usize,
    /// `n_hidden` rows of `inputs.len()` weights.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    /// One weight per hidden unit, or per input when `n_hidden = 0`.
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub input_scalers: Vec<Scaler>,
    pub output_scaler: Scaler,
    pub report: Option<TrainingReport>,
}

impl NeuralModel {
    /// All-zero network with identity scalers.
    pub fn zeros(n_inputs: usize, n_hidden: usize) -> Self {
        let n_out = if n_hidden == 0 { n_inputs } else { n_hidden };
        Self {
            inputs: Vec::new(),
            response: None,
            n_hidden,
            hidden_weights: vec![vec![0.0; n_inputs]; n_hidden],
            hidden_bias: vec![0.0; n_hidden],
            output_weights: vec![0.0; n_out],
            output_bias: 0.0,
            input_scalers: vec![Scaler::IDENTITY; n_inputs],
            output_scaler: Scaler::IDENTITY,
            report: None,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.input_scalers.len()
    }

    pub fn parameter_count(&self) -> usize {
        let n = self.n_inputs();
        if self.n_hidden == 0 {
            n + 1
        } else {
            self.n_hidden * (n + 2) + 1
        }
    }

    /// Weights flattened as `[w_1.., b_1, w_2.., b_2, …, v.., c]`.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for (w, b) in self.hidden_weights.iter().zip(&self.hidden_bias) {
            out.extend(w);
            out.push(*b);
        }
        out.extend(&self.output_weights);
        out.push(self.output_bias);
        out
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.parameter_count(), "parameter vector length");
        let n = self.n_inputs();
        let mut it = p.iter().copied();
        for j in 0..self.n_hidden {
            for k in 0..n {
                self.hidden_weights[j][k] = it.next().unwrap();
            }
            self.hidden_bias[j] = it.next().unwrap();
        }
        for v in self.output_weights.iter_mut() {
            *v = it.next().unwrap();
        }
        self.output_bias = it.next().unwrap();
    }

    fn scaled_inputs(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.input_scalers)
            .map(|(v, s)| s.apply(*v))
            .collect()
    }

    fn hidden(&self, z: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(w, b)| (w.iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + b).tanh())
            .collect()
    }

    /// Output in standardized units.
    fn forward_scaled(&self, z: &[f64]) -> f64 {
        let layer = if self.n_hidden == 0 {
            z.to_vec()
        } else {
            self.hidden(z)
        };
        layer
            .iter()
            .zip(&self.output_weights)
            .map(|(h, v)| h * v)
            .sum::<f64>()
            + self.output_bias
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_inputs() {
            return Err(Error::invalid(format!(
                "network takes {} input(s), got {}",
                self.n_inputs(),
                x.len()
            )));
        }
        Ok(self
            .output_scaler
            .invert(self.forward_scaled(&self.scaled_inputs(x))))
    }

    /// Gradient of the standardized output with respect to the parameters.
    fn gradient_scaled(&self, z: &[f64], row: &mut [f64]) {
        if self.n_hidden == 0 {
            row[..z.len()].copy_from_slice(z);
            row[z.len()] = 1.0;
            return;
        }
        let n = z.len();
        let h = self.hidden(z);
        let out_base = self.n_hidden * (n + 1);
        for j in 0..self.n_hidden {
            let d = self.output_weights[j] * (1.0 - h[j] * h[j]);
            let base = j * (n + 1);
            for k in 0..n {
                row[base + k] = d * z[k];
            }
            row[base + n] = d;
            row[out_base + j] = h[j];
        }
        row[out_base + self.n_hidden] = 1.0;
    }

    /// `∂output/∂params` for each sample row, in output units.
    pub fn jacobian(&self, inputs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let p = self.parameter_count();
        let mut j = DMatrix::zeros(inputs.len(), p);
        let mut row = vec![0.0; p];
        for (i, x) in inputs.iter().enumerate() {
            if x.len() != self.n_inputs() {
                return Err(Error::invalid(
                    "input row length does not match the network",
                ));
            }
            self.gradient_scaled(&self.scaled_inputs(x), &mut row);
            for (c, g) in row.iter().enumerate() {
                j[(i, c)] = g * self.output_scaler.std;
            }
        }
        Ok(j)
    }
}

/// `(1/N) Σ (s − y)²`.
pub fn eqm_values(s: &[f64], y: &[f64]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::NoData);
    }
    if s.len() != y.len() {
        return Err(Error::invalid("eqm needs equally long sequences"));
    }
    Ok(s.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / s.len() as f64)
}

pub fn eqm(model: &NeuralModel, inputs: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
    let outputs = inputs
        .iter()
        .map(|x| model.forward(x))
        .collect::<Result<Vec<_>>>()?;
    eqm_values(&outputs, targets)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub n_hidden: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub lambda_init: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            n_hidden: DEFAULT_HIDDEN,
            seed: 0,
            max_iter: 200,
            lambda_init: 1e-2,
        }
    }
}

/// Train a network on `inputs` (one row per sample) and `targets`.
pub fn train_lm(
    inputs: &[Vec<f64>],
    targets: &[f64],
    options: TrainOptions,
) -> Result<NeuralModel> {
    let n = targets.len();
    if n == 0 || inputs.len() != n {
        return Err(Error::invalid(
            "training needs equally many input rows and targets",
        ));
    }
    let n_in = inputs[0].len();
    if n_in == 0 || inputs.iter().any(|r| r.len() != n_in) {
        return Err(Error::invalid("input rows must share a positive length"));
    }
    if targets
        .iter()
        .chain(inputs.iter().flatten())
        .any(|v| !v.is_finite())
    {
        return Err(Error::invalid("training data must be finite"));
    }

    let mut model = NeuralModel::zeros(n_in, options.n_hidden);
    model.input_scalers = (0..n_in)
        .map(|k| Scaler::fit(&inputs.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect();
    model.output_scaler = Scaler::fit(targets);
    let p_count = model.parameter_count();
    let small_sample = n < 10 * p_count;

    if targets.iter().all(|t| *t == targets[0]) {
        model.output_scaler = Scaler {
            mean: targets[0],
            std: 1.0,
        };
        model.report = Some(TrainingReport {
            eqm_history: vec![0.0],
            final_lambda: options.lambda_init,
            iterations: 0,
            stop: StopReason::ConstantTarget,
            small_sample,
        });
        return Ok(model);
    }

    let mut rng = stats::rng(options.seed);
    let init: Vec<f64> = (0..p_count).map(|_| rng.random_range(-0.5..=0.5)).collect();
    model.set_params(&init);

    let z: Vec<Vec<f64>> = inputs.iter().map(|x| model.scaled_inputs(x)).collect();
    let t: Vec<f64> = targets
        .iter()
        .map(|v| model.output_scaler.apply(*v))
        .collect();
    let residuals = |m: &NeuralModel| -> DVector<f64> {
        DVector::from_iterator(n, z.iter().zip(&t).map(|(x, y)| m.forward_scaled(x) - y))
    };
    let to_units = model.output_scaler.std * model.output_scaler.std;

    let mut e = residuals(&model);
    let mut current = e.norm_squared() / n as f64;
    let mut history = vec![current * to_units];
    let mut lambda = options.lambda_init;
    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    let mut row = vec![0.0; p_count];

    while iterations < options.max_iter {
        iterations += 1;
        let mut jm = DMatrix::zeros(n, p_count);
        for (i, x) in z.iter().enumerate() {
            model.gradient_scaled(x, &mut row);
            for (c, g) in row.iter().enumerate() {
                jm[(i, c)] = *g;
            }
        }
        let jtj = jm.transpose() * &jm;
        let jte = jm.transpose() * &e;
        let base = model.params();

        let mut accepted = None;
        loop {
            let a = &jtj + DMatrix::identity(p_count, p_count) * lambda;
            let Some(chol) = a.cholesky() else {
                if lambda >= LAMBDA_LIMIT {
                    return Err(Error::Stalled(lambda));
                }
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&jte));
            let trial: Vec<f64> = base.iter().zip(step.iter()).map(|(b, s)| b + s).collect();
            let mut cand = model.clone();
            cand.set_params(&trial);
            let ce = residuals(&cand);
            let ceqm = ce.norm_squared() / n as f64;
            if ceqm < current {
                lambda /= 10.0;
                accepted = Some((cand, ce, ceqm, step.norm()));
                break;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_LIMIT {
                break;
            }
        }
        let Some((cand, ce, ceqm, step_norm)) = accepted else {
            stop = StopReason::LambdaLimit;
            break;
        };
        let improvement = current - ceqm;
        model = cand;
        e = ce;
        current = ceqm;
        history.push(current * to_units);
        if step_norm < 1e-9 {
            stop = StopReason::SmallStep;
            break;
        }
        if improvement < 1e-12 {
            stop = StopReason::SmallImprovement;
            break;
        }
    }

    model.report = Some(TrainingReport {
        eqm_history: history,
        final_lambda: lambda,
        iterations,
        stop,
        small_sample,
    });
    Ok(model)
}

/// Train `response` from `predictors` on the rows selected by `criteria`.
pub fn fit_neural(
    response: &ClimateSeries,
    predictors: &[ClimateSeries],
    criteria: &SelectionCriteria,
    extra: &[ClimateSeries],
    options: TrainOptions,
) -> Result<NeuralModel> {
    let (inputs, targets) = select_rows(response, predictors, criteria, extra)?;
    if targets.is_empty() {
        return Err(Error::NoData);
    }
    let mut model = train_lm(&inputs, &targets, options)?;
    model.inputs = predictors.iter().map(|p| p.variable()).collect();
    model.response = Some(response.variable());
    Ok(model)
}

/// Default predictors for a network response.
pub fn default_inputs(response: Variable) -> Vec<Variable> {
    match response {
        Variable::RelHumidity => vec![Variable::DryBulbTemp],
        _ => vec![
            Variable::GlobalRad,
            Variable::DiffuseRad,
            Variable::WindSpeed,
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_hidden: usize,
    pub train_eqm: f64,
    pub validation_eqm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub best: usize,
    /// The network with the lowest validation eqm, trained on the 80 %
    /// training split.
    pub model: NeuralModel,
}

/// Train one network per hidden size on a seeded 80/20 split and keep the
/// one with the smallest validation eqm.
pub fn sweep_hidden(
    inputs: &[Vec<f64>],
    targets: &[f64],
    hidden: std::ops::RangeInclusive<usize>,
    options: TrainOptions,
) -> Result<SweepResult> {
    if inputs.len() != targets.len() || targets.len() < 5 {
        return Err(Error::invalid("sweep needs at least 5 aligned samples"));
    }
    let mut idx: Vec<usize> = (0..targets.len()).collect();
    idx.shuffle(&mut stats::rng(stats::mix_seed(options.seed, 0x5eed)));
    let cut = (targets.len() * 4).div_ceil(5).min(targets.len() - 1);
    let pick = |ids: &[usize]| -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            ids.iter().map(|i| inputs[*i].clone()).collect(),
            ids.iter().map(|i| targets[*i]).collect(),
        )
    };
    let (tx, ty) = pick(&idx[..cut]);
    let (vx, vy) = pick(&idx[cut..]);

    let mut rows = Vec::new();
    let mut best: Option<(f64, NeuralModel)> = None;
    for h in hidden {
        let m = train_lm(
            &tx,
            &ty,
            TrainOptions {
                n_hidden: h,
                ..options
            },
        )?;
        let train_eqm = eqm(&m, &tx, &ty)?;
        let validation_eqm = eqm(&m, &vx, &vy)?;
        rows.push(SweepRow {
            n_hidden: h,
            train_eqm,
            validation_eqm,
        });
        if best.as_ref().is_none_or(|(v, _)| validation_eqm < *v) {
            best = Some((validation_eqm, m));
        }
    }
    let (_, model) = best.ok_or_else(|| Error::invalid("empty hidden-size range"))?;
    Ok(SweepResult {
        rows,
        best: model.n_hidden,
        model,
    })
}
