//! Dictionary learning: alternate exact or sampled sparse inference with
//! batched SGD on the dictionary.

mod solver;

use nalgebra::{DMatrix, DVector};
use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::dictionary::Dictionary;
use crate::energy::{sc_energy, SparsityPenalty};
use crate::error::{check_dim, Error, Result};
use crate::qubo::QuboBuilder;
use crate::seed::{self, tags};

pub use solver::{Solver, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnConfig {
    pub eta_initial: f64,
    /// Decay horizon `T` in `η_t = η₀ / (1 + t/T)`; one epoch's batch count
    /// when absent.
    pub eta_decay_steps: Option<usize>,
    pub batch_size: usize,
    pub max_outer_iters: usize,
    pub converge_tol: f64,
    pub lambda: SparsityPenalty,
    /// When set, `λ` is re-tuned to this mean sparsity before every outer
    /// iteration and `lambda` is only the fallback.
    pub target_sparsity: Option<f64>,
    pub probe_size: usize,
    pub solver: SolverConfig,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            eta_initial: 0.01,
            eta_decay_steps: None,
            batch_size: 50,
            max_outer_iters: 10,
            converge_tol: 1e-3,
            lambda: SparsityPenalty::new(0.1).expect("valid"),
            target_sparsity: None,
            probe_size: 128,
            solver: SolverConfig::sa(),
            seed: 0,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
        }
        if !(self.eta_initial.is_finite() && self.eta_initial > 0.0) {
            return Err(Error::InvalidArgument("eta_initial must be positive".into()));
        }
        if self.eta_decay_steps == Some(0) {
            return Err(Error::InvalidArgument("eta_decay_steps must be at least 1".into()));
        }
        if self.target_sparsity.is_some_and(|t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidArgument("target_sparsity must lie in (0, 1)".into()));
        }
        if !(self.converge_tol.is_finite() && self.converge_tol > 0.0) {
            return Err(Error::InvalidArgument("converge_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Per outer iteration: mean energy after the SGD epoch, mean sparsity of
/// the codes that epoch used and the penalty in force.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub energy: Vec<f64>,
    pub sparsity: Vec<f64>,
    pub lambda: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Best code for each input under the given solver. Input `i` uses the seed
/// `derive(seed, i)`.
pub fn infer_codes(
    dictionary: &Dictionary,
    inputs: &[Vec<f64>],
    lambda: SparsityPenalty,
    solver: &Solver,
    seed: u64,
) -> Result<Vec<SparseCode>> {
    let builder = QuboBuilder::new(dictionary);
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let qubo = builder.build(x, lambda)?;
            Ok(solver.solve(&qubo, seed::derive(seed, i as u64))?.best_code)
        })
        .collect()
}

/// Gradient of the batch-mean energy with respect to the dictionary.
pub fn grad_dictionary(dictionary: &Dictionary, batch_x: &[&[f64]], batch_a: &[&SparseCode]) -> Result<DMatrix<f64>> {
    if batch_x.is_empty() {
        return Err(Error::Empty("gradient batch"));
    }
    check_dim(batch_x.len(), batch_a.len())?;
    let mut grad = DMatrix::zeros(dictionary.dim(), dictionary.n_atoms());
    for (x, a) in batch_x.iter().zip(batch_a) {
        check_dim(dictionary.dim(), x.len())?;
        let residual = DVector::from_column_slice(x) - dictionary.reconstruct(a)?;
        for j in a.active() {
            let mut col = grad.column_mut(j);
            col -= &residual;
        }
    }
    Ok(grad / batch_x.len() as f64)
}

pub fn sgd_step(dictionary: &Dictionary, gradient: &DMatrix<f64>, eta: f64) -> Result<Dictionary> {
    if gradient.shape() != dictionary.matrix().shape() {
        return Err(Error::DimensionMismatch {
            expected: dictionary.dim() * dictionary.n_atoms(),
            found: gradient.nrows() * gradient.ncols(),
        });
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("learning rate {eta} must be non-negative")));
    }
    Dictionary::from_projected(dictionary.matrix() - gradient * eta)
}

/// Mean fraction of active entries over all codes.
pub fn sparsity(codes: &[SparseCode]) -> Result<f64> {
    let total: usize = codes.iter().map(SparseCode::len).sum();
    if codes.is_empty() || total == 0 {
        return Err(Error::Empty("codes"));
    }
    let ones: usize = codes.iter().map(SparseCode::count_ones).sum();
    Ok(ones as f64 / total as f64)
}

pub fn mean_energy(
    dictionary: &Dictionary,
    inputs: &[Vec<f64>],
    codes: &[SparseCode],
    lambda: SparsityPenalty,
) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::Empty("inputs"));
    }
    check_dim(inputs.len(), codes.len())?;
    let sum = inputs
        .iter()
        .zip(codes)
        .map(|(x, a)| sc_energy(dictionary, x, a, lambda))
        .sum::<Result<f64>>()?;
    Ok(sum / inputs.len() as f64)
}

pub fn train_dictionary(
    inputs: &[Vec<f64>],
    initial: Dictionary,
    config: &LearnConfig,
) -> Result<(Dictionary, TrainTrace)> {
    config.validate()?;
    if inputs.is_empty() {
        return Err(Error::Empty("training inputs"));
    }
    for x in inputs {
        check_dim(initial.dim(), x.len())?;
    }
    let mut trace = TrainTrace::default();
    if config.max_outer_iters == 0 {
        return Ok((initial, trace));
    }
    let solver = Solver::new(&config.solver, initial.n_atoms())?;
    let batches_per_epoch = inputs.len().div_ceil(config.batch_size);
    let decay = config.eta_decay_steps.unwrap_or(batches_per_epoch) as f64;
    let mut dictionary = initial;
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut step = 0usize;
    let mut previous: Option<f64> = None;
    for iter in 0..config.max_outer_iters {
        let it = iter as u64;
        let lambda = match config.target_sparsity {
            None => config.lambda,
            Some(target) => {
                let options = TuneOptions {
                    target,
                    probe_size: config.probe_size,
                    seed: seed::derive_path(config.seed, &[tags::TUNE, it]),
                    ..TuneOptions::default()
                };
                tune_lambda_or_densest(&dictionary, inputs, &solver, &options)?
            }
        };
        let codes = infer_codes(
            &dictionary,
            inputs,
            lambda,
            &solver,
            seed::derive_path(config.seed, &[tags::INFER, it]),
        )?;
        if previous.is_none() {
            previous = Some(mean_energy(&dictionary, inputs, &codes, lambda)?);
        }
        order.shuffle(&mut seed::rng(seed::derive_path(config.seed, &[tags::SHUFFLE, it])));
        for batch in order.chunks(config.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| inputs[i].as_slice()).collect();
            let as_: Vec<&SparseCode> = batch.iter().map(|&i| &codes[i]).collect();
            let grad = grad_dictionary(&dictionary, &xs, &as_)?;
            let eta = config.eta_initial / (1.0 + step as f64 / decay);
            dictionary = sgd_step(&dictionary, &grad, eta)?;
            step += 1;
        }
        let energy = mean_energy(&dictionary, inputs, &codes, lambda)?;
        trace.energy.push(energy);
        trace.sparsity.push(sparsity(&codes)?);
        trace.lambda.push(lambda.value());
        trace.iterations += 1;
        let prev = previous.replace(energy).expect("set above");
        let change = (prev - energy).abs() / prev.abs().max(f64::MIN_POSITIVE);
        if change < config.converge_tol {
            trace.converged = true;
            break;
        }
    }
    Ok((dictionary, trace))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneOptions {
    pub target: f64,
    /// `(λ_lo, λ_hi)`; `λ_lo = 0` and `λ_hi` just above the largest
    /// `½‖x‖²` on the probe set when absent.
    pub bounds: Option<(f64, f64)>,
    pub probe_size: usize,
    pub tolerance: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            target: 0.2,
            bounds: None,
            probe_size: 128,
            tolerance: 0.02,
            max_iters: 20,
            seed: 0,
        }
    }
}

/// Upper bound at which the empty code is optimal for every input.
pub fn default_lambda_bounds(inputs: &[Vec<f64>]) -> (f64, f64) {
    let max_half_norm = inputs
        .iter()
        .map(|x| 0.5 * x.iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max);
    (0.0, max_half_norm * 1.01 + 1e-6)
}

/// Bisect on `λ` until the probe-set sparsity is within tolerance of the
/// target.
pub fn tune_lambda(
    dictionary: &Dictionary,
    inputs: &[Vec<f64>],
    solver: &Solver,
    options: &TuneOptions,
) -> Result<SparsityPenalty> {
    let target = options.target;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target sparsity {target} must lie in (0, 1)")));
    }
    if inputs.is_empty() {
        return Err(Error::Empty("tuning inputs"));
    }
    let probe: Vec<Vec<f64>> = if inputs.len() <= options.probe_size {
        inputs.to_vec()
    } else {
        let mut rng = seed::rng(seed::derive(options.seed, tags::PROBE));
        let mut idx = index::sample(&mut rng, inputs.len(), options.probe_size).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| inputs[i].clone()).collect()
    };
    let (mut lo, mut hi) = options.bounds.unwrap_or_else(|| default_lambda_bounds(&probe));
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid lambda bounds [{lo}, {hi}]")));
    }
    let infer_seed = seed::derive(options.seed, tags::TUNE);
    let measure = |lambda: f64| -> Result<f64> {
        let codes = infer_codes(dictionary, &probe, SparsityPenalty::new(lambda)?, solver, infer_seed)?;
        sparsity(&codes)
    };
    let s_lo = measure(lo)?;
    let s_hi = measure(hi)?;
    if !(s_lo >= target && target >= s_hi) {
        return Err(Error::BracketInvalid {
            target,
            lo_sparsity: s_lo,
            hi_sparsity: s_hi,
        });
    }
    for _ in 0..options.max_iters {
        let mid = 0.5 * (lo + hi);
        let s = measure(mid)?;
        if (s - target).abs() <= options.tolerance {
            return SparsityPenalty::new(mid);
        }
        if s > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SparsityPenalty::new(0.5 * (lo + hi))
}

/// As [`tune_lambda`], but when even the lower bound is sparser than the
/// target, returns the lower bound: the densest coding available.
pub fn tune_lambda_or_densest(
    dictionary: &Dictionary,
    inputs: &[Vec<f64>],
    solver: &Solver,
    options: &TuneOptions,
) -> Result<SparsityPenalty> {
    match tune_lambda(dictionary, inputs, solver, options) {
        Err(Error::BracketInvalid { lo_sparsity, .. }) if lo_sparsity < options.target => {
            SparsityPenalty::new(options.bounds.map_or(0.0, |b| b.0))
        }
        other => other,
    }
}
