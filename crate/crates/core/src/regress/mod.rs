//! Regression by inpainting: learn a dictionary over `(x, y)` vectors, then
//! reconstruct the missing `y` of a new input from its sparse code.

mod io;
mod scaling;

use nalgebra::{DMatrix, RowDVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::dictionary::Dictionary;
use crate::energy::SparsityPenalty;
use crate::error::{Error, Result};
use crate::learn::{train_dictionary, LearnConfig, Solver, TrainTrace};
use crate::qubo::QuboBuilder;
use crate::sample::Sample;
use crate::seed::{self, tags};
use crate::standardize::{mean_std, standardize_fit, StandardizationStats};

pub use io::{load_model, save_model, MODEL_CONFIG_FILE, MODEL_DICTIONARY_FILE, MODEL_STATS_FILE};
pub use scaling::{fit_scaling, ScalingFit};

/// Which inputs the dictionary is pre-trained on before `y` is appended.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PretrainSource {
    /// Test inputs only.
    #[serde(rename = "test")]
    TestOnly,
    /// Training and test inputs.
    #[default]
    Combined,
    /// No pre-training: the extended dictionary starts random.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub n_q: usize,
    pub pretrain_source: PretrainSource,
    /// Mean sparsity `λ` is re-tuned to before every outer iteration of
    /// pre-training and training. `None` keeps `learn.lambda`.
    pub target_sparsity: Option<f64>,
    pub probe_size: usize,
    pub learn: LearnConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_q: 20,
            pretrain_source: PretrainSource::default(),
            target_sparsity: Some(0.2),
            probe_size: 128,
            learn: LearnConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub stats: StandardizationStats,
    /// `(D + 1) × N_q`; the last row predicts `y`.
    pub extended_dictionary: Dictionary,
    pub config: FitConfig,
    /// Penalty in force for the last training iteration, used for
    /// prediction.
    pub lambda: SparsityPenalty,
    pub pretrain_trace: TrainTrace,
    pub train_trace: TrainTrace,
}

impl RegressionModel {
    pub fn input_dim(&self) -> usize {
        self.stats.input_dim()
    }

    /// Overcompleteness `N_q / D`.
    pub fn gamma(&self) -> f64 {
        self.config.n_q as f64 / self.input_dim() as f64
    }

    pub fn predictor(&self) -> Result<Predictor<'_>> {
        Ok(Predictor {
            model: self,
            solver: Solver::new(&self.config.learn.solver, self.extended_dictionary.n_atoms())?,
            builder: QuboBuilder::new(&self.extended_dictionary),
        })
    }
}

fn seeded_random(dim: usize, n_q: usize, seed: u64) -> Result<Dictionary> {
    Dictionary::random(dim, n_q, &mut seed::rng(seed::derive(seed, tags::INIT_DICTIONARY)))
}

/// Learns a `D × N_q` dictionary on inputs alone, starting from a seeded
/// random dictionary.
pub fn pretrain(x_vectors: &[Vec<f64>], n_q: usize, learn: &LearnConfig) -> Result<(Dictionary, TrainTrace)> {
    let first = x_vectors.first().ok_or(Error::Empty("pre-training inputs"))?;
    let initial = seeded_random(first.len(), n_q, seed::derive(learn.seed, tags::PRETRAIN))?;
    train_dictionary(x_vectors, initial, learn)
}

/// Appends a zero row for the target coordinate.
pub fn extend_dictionary(dictionary: &Dictionary) -> Result<Dictionary> {
    let m = dictionary.matrix();
    let extended = m.clone().insert_row(m.nrows(), 0.0);
    debug_assert_eq!(extended.row(m.nrows()), RowDVector::zeros(m.ncols()));
    Dictionary::new(extended)
}

pub fn fit(train: &[Sample], test_x: &[Vec<f64>], config: &FitConfig) -> Result<RegressionModel> {
    let stats = standardize_fit(train)?;
    let d = stats.input_dim();
    let train_std: Vec<Sample> = train.iter().map(|s| stats.apply(s)).collect::<Result<_>>()?;
    let test_std: Vec<Vec<f64>> = test_x.iter().map(|x| stats.apply_x(x)).collect::<Result<_>>()?;
    let seed = config.learn.seed;

    let pretrain_inputs: Vec<Vec<f64>> = match config.pretrain_source {
        PretrainSource::TestOnly => test_std,
        PretrainSource::Combined => train_std.iter().map(|s| s.x.clone()).chain(test_std).collect(),
        PretrainSource::Off => Vec::new(),
    };
    let learn = |tag: u64| LearnConfig {
        target_sparsity: config.target_sparsity,
        probe_size: config.probe_size,
        seed: seed::derive(seed, tag),
        ..config.learn.clone()
    };
    let (initial, pretrain_trace) = if config.pretrain_source == PretrainSource::Off {
        (
            seeded_random(d + 1, config.n_q, seed::derive(seed, tags::TRAIN))?,
            TrainTrace::default(),
        )
    } else {
        let (phi, trace) = pretrain(&pretrain_inputs, config.n_q, &learn(tags::PRETRAIN))?;
        (extend_dictionary(&phi)?, trace)
    };

    let joint: Vec<Vec<f64>> = train_std
        .iter()
        .map(|s| s.concatenated().expect("training samples carry y"))
        .collect();
    let (extended_dictionary, train_trace) = train_dictionary(&joint, initial, &learn(tags::TRAIN))?;
    let lambda = match train_trace.lambda.last() {
        Some(&l) => SparsityPenalty::new(l)?,
        None => config.learn.lambda,
    };
    Ok(RegressionModel {
        stats,
        extended_dictionary,
        config: config.clone(),
        lambda,
        pretrain_trace,
        train_trace,
    })
}

/// A model with its solver ready for repeated predictions.
pub struct Predictor<'a> {
    model: &'a RegressionModel,
    solver: Solver,
    builder: QuboBuilder<'a>,
}

impl Predictor<'_> {
    /// Prediction for one raw input, with the code that produced it. The
    /// solver seed depends only on the model seed and the input values.
    pub fn infer(&self, x: &[f64]) -> Result<(f64, SparseCode)> {
        let stats = &self.model.stats;
        let mut v = stats.apply_x(x)?;
        if v.iter().any(|u| !u.is_finite()) {
            return Err(Error::NonFinite("prediction input"));
        }
        v.push(0.0);
        let qubo = self.builder.build(&v, self.model.lambda)?;
        let s = seed::derive_path(self.model.config.learn.seed, &[tags::PREDICT, seed::hash_f64s(x)]);
        let code = self.solver.solve(&qubo, s)?.best_code;
        let recon = self.model.extended_dictionary.reconstruct(&code)?;
        let t = stats.target_index();
        Ok((stats.invert(recon[t], t)?, code))
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.infer(x).map(|(y, _)| y)
    }

    pub fn infer_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<(f64, SparseCode)>> {
        xs.par_iter().map(|x| self.infer(x)).collect()
    }
}

pub fn predict(model: &RegressionModel, x: &[f64]) -> Result<f64> {
    model.predictor()?.predict(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub predictions: Vec<f64>,
    /// `y - ŷ` per sample.
    pub errors: Vec<f64>,
    pub q_value: f64,
    pub error_stddev: f64,
    pub target_stddev: f64,
}

impl PredictionReport {
    /// `Q = σ(y - ŷ) / σ(y)` with `n - 1` standard deviations.
    pub fn from_predictions(predictions: Vec<f64>, truth: &[f64]) -> Result<Self> {
        if predictions.len() != truth.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                found: predictions.len(),
            });
        }
        if truth.is_empty() {
            return Err(Error::Empty("evaluation samples"));
        }
        if truth.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: truth.len(),
            });
        }
        let errors: Vec<f64> = truth.iter().zip(&predictions).map(|(y, p)| y - p).collect();
        let (_, target_stddev) = mean_std(truth);
        if target_stddev <= 0.0 {
            return Err(Error::ZeroVariance { coordinate: 0 });
        }
        let (_, error_stddev) = mean_std(&errors);
        Ok(Self {
            predictions,
            errors,
            q_value: error_stddev / target_stddev,
            error_stddev,
            target_stddev,
        })
    }
}

fn truths(samples: &[Sample]) -> Result<Vec<f64>> {
    samples
        .iter()
        .map(|s| s.y.ok_or_else(|| Error::InvalidArgument("evaluation sample without y".into())))
        .collect()
}

pub fn evaluate(model: &RegressionModel, test: &[Sample]) -> Result<PredictionReport> {
    evaluate_with_codes(model, test).map(|(r, _)| r)
}

fn evaluate_with_codes(model: &RegressionModel, test: &[Sample]) -> Result<(PredictionReport, Vec<SparseCode>)> {
    if test.is_empty() {
        return Err(Error::Empty("evaluation samples"));
    }
    let y = truths(test)?;
    let xs: Vec<Vec<f64>> = test.iter().map(|s| s.x.clone()).collect();
    let (predictions, codes): (Vec<f64>, Vec<SparseCode>) = model.predictor()?.infer_batch(&xs)?.into_iter().unzip();
    Ok((PredictionReport::from_predictions(predictions, &y)?, codes))
}

/// Counts of `values` in `bins` equal-width bins spanning their range, as
/// `(left edge, right edge, count)`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_q: usize,
    pub q: f64,
    pub error_stddev: f64,
    /// Mean sparsity of the codes used for the test predictions.
    pub sparsity: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub train_iterations: usize,
}

/// Full pipeline once per entry of `nq_list`.
pub fn sweep_nq(train: &[Sample], test: &[Sample], nq_list: &[usize], config: &FitConfig) -> Result<Vec<SweepRow>> {
    if nq_list.is_empty() {
        return Err(Error::Empty("N_q list"));
    }
    let test_x: Vec<Vec<f64>> = test.iter().map(|s| s.x.clone()).collect();
    nq_list
        .iter()
        .map(|&n_q| {
            let model = fit(train, &test_x, &FitConfig { n_q, ..config.clone() })?;
            let (report, codes) = evaluate_with_codes(&model, test)?;
            Ok(SweepRow {
                n_q,
                q: report.q_value,
                error_stddev: report.error_stddev,
                sparsity: crate::learn::sparsity(&codes)?,
                lambda: model.lambda.value(),
                gamma: model.gamma(),
                train_iterations: model.train_trace.iterations,
            })
        })
        .collect()
}

/// Row-major matrix rows for CSV output.
pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
