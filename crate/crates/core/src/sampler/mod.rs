//! Gradient-descent sampling of satisfying assignments.
//!
//! Each sample row of the embedding matrix `V` is mapped through the
//! sigmoid to input probabilities, pushed through the relaxed circuit, and
//! scored by the squared distance of every pinned net from its target. One
//! GD step per iteration moves the trainable (support-cone) columns; after
//! every step the rows are hardened (`v >= 0` is 1), checked against the
//! exact simulator, and new assignments are added to the solution set.

mod run;
mod solutions;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{support_cone, Circuit, ConstraintError, ConstraintSet, NetId};
use crate::probsim::{BackwardWork, Lanes, Plan, ProbError, ProbTape};
use crate::Real;

pub use run::run_sampling;
pub use solutions::{IterationStats, SolutionSet};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("constraint cone contains no primary inputs")]
    EmptyCone,
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Which input bits identify a solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupScope {
    /// Only inputs in the support cone of the pins.
    #[default]
    Cone,
    /// Every primary input, don't-cares included.
    AllInputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    /// `V` is drawn from `Uniform[-init_range, init_range]`.
    pub init_range: f64,
    pub dedup_scope: DedupScope,
    /// Worker threads, 0 for one per core. Never changes the result.
    #[serde(skip)]
    pub threads: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            batch_size: 10_000,
            learning_rate: 15.0,
            iterations: 10,
            seed: 0,
            init_range: 1.0,
            dedup_scope: DedupScope::Cone,
            threads: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |msg: &str| Err(SamplerError::InvalidConfig(msg.to_owned()));
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if self.iterations == 0 {
            return bad("iteration count must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be a positive number");
        }
        if !(self.init_range.is_finite() && self.init_range > 0.0) {
            return bad("init range must be a positive number");
        }
        Ok(())
    }
}

/// Dense row-major `rows x cols` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Real>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Real {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Real) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Real] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Real> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[Real] {
        &self.data
    }
}

/// Learnable pre-activations `V` (one row per sample, one column per
/// primary input) and the mask of columns GD may change.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    pub values: Matrix,
    pub cone_mask: Vec<bool>,
}

impl EmbeddingMatrix {
    pub fn new(values: Matrix, cone_mask: Vec<bool>) -> Self {
        assert_eq!(values.cols(), cone_mask.len());
        EmbeddingMatrix { values, cone_mask }
    }

    pub fn batch(&self) -> usize {
        self.values.rows()
    }

    pub fn inputs(&self) -> usize {
        self.values.cols()
    }

    /// Indices of trainable columns.
    pub fn cone_columns(&self) -> Vec<usize> {
        cone_columns(&self.cone_mask)
    }
}

fn cone_columns(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(j, &m)| m.then_some(j))
        .collect()
}

/// Cone mask over primary-input positions.
pub fn cone_mask(circuit: &Circuit, constraints: &ConstraintSet) -> Vec<bool> {
    let mut mask = vec![false; circuit.inputs().len()];
    for net in support_cone(circuit, constraints) {
        mask[circuit.input_position(net).unwrap()] = true;
    }
    mask
}

/// Generator for sample `sample`: a ChaCha stream keyed by `(seed, sample)`,
/// so each row is independent of batch size and of how the batch is split.
pub(crate) fn sample_rng(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

pub(crate) fn fill_row(seed: u64, sample: usize, range: Real, row: &mut [Real]) {
    let mut rng = sample_rng(seed, sample);
    for v in row {
        *v = rng.gen_range(-range..=range);
    }
}

pub fn init_embeddings(
    config: &SamplerConfig,
    circuit: &Circuit,
    constraints: &ConstraintSet,
) -> Result<EmbeddingMatrix, SamplerError> {
    config.validate()?;
    constraints.check_against(circuit)?;
    let mask = cone_mask(circuit, constraints);
    if !mask.iter().any(|&m| m) {
        return Err(SamplerError::EmptyCone);
    }
    let n = circuit.inputs().len();
    let mut values = Matrix::zeros(config.batch_size, n);
    for (s, row) in values.data.chunks_mut(n.max(1)).enumerate().take(config.batch_size) {
        fill_row(config.seed, s, config.init_range as Real, row);
    }
    Ok(EmbeddingMatrix::new(values, mask))
}

#[inline]
pub fn sigmoid(v: Real) -> Real {
    1.0 / (1.0 + (-v).exp())
}

/// Per-sample loss and its gradient for a block of embedding rows.
pub(crate) struct LossKernel<'c> {
    plan: Plan<'c>,
    pins: Vec<NetId>,
    targets: Vec<Real>,
    cone: Vec<usize>,
}

#[derive(Default)]
pub(crate) struct KernelWork {
    probs: Option<Lanes>,
    tape: ProbTape,
    seeds: Option<Lanes>,
    back: BackwardWork,
    grads: Option<Lanes>,
}

impl<'c> LossKernel<'c> {
    pub(crate) fn new(circuit: &'c Circuit, constraints: &ConstraintSet, mask: &[bool]) -> Self {
        let pins: Vec<NetId> = constraints.nets().collect();
        LossKernel {
            plan: Plan::cone(circuit, pins.iter().copied()),
            targets: constraints.iter().map(|(_, t)| Real::from(t)).collect(),
            pins,
            cone: cone_columns(mask),
        }
    }

    pub(crate) fn cone(&self) -> &[usize] {
        &self.cone
    }

    /// `rows` is a row-major block of `V` with `n` columns. Adds `dL/dV` of
    /// the cone columns into `grad` (same layout) and returns the
    /// per-sample loss.
    pub(crate) fn eval(
        &self,
        rows: &[Real],
        n: usize,
        work: &mut KernelWork,
        grad: &mut [Real],
    ) -> Result<Vec<Real>, ProbError> {
        let batch = rows.len().checked_div(n).unwrap_or(0);
        let probs = work.probs.get_or_insert_with(|| Lanes::zeros(0, 0));
        if probs.batch() != batch || probs.width() != n {
            *probs = Lanes::zeros(batch, n);
        }
        for &j in &self.cone {
            let lane = probs.lane_mut(j);
            for (s, p) in lane.iter_mut().enumerate() {
                *p = sigmoid(rows[s * n + j]);
            }
        }
        self.plan.forward_into(probs, &mut work.tape)?;

        let k = self.pins.len();
        let seeds = work.seeds.get_or_insert_with(|| Lanes::zeros(0, 0));
        if seeds.batch() != batch || seeds.width() != k {
            *seeds = Lanes::zeros(batch, k);
        }
        let mut loss = vec![0.0; batch];
        for (idx, (&pin, &t)) in self.pins.iter().zip(&self.targets).enumerate() {
            let p = work.tape.row(pin);
            let seed = seeds.lane_mut(idx);
            for s in 0..batch {
                let d = p[s] - t;
                loss[s] += d * d;
                seed[s] = 2.0 * d;
            }
        }

        let grads = work.grads.get_or_insert_with(|| Lanes::zeros(0, 0));
        self.plan
            .backward_into(&work.tape, &self.pins, seeds, &mut work.back, grads)?;
        for &j in &self.cone {
            let g = grads.lane(j);
            let p = probs.lane(j);
            for s in 0..batch {
                grad[s * n + j] = g[s] * p[s] * (1.0 - p[s]);
            }
        }
        Ok(loss)
    }
}

/// Per-sample loss `sum_pins (p - t)^2` with `P = sigmoid(V)`, and `dL/dV`.
/// Columns outside the cone get exactly zero gradient.
pub fn loss_and_grad(
    circuit: &Circuit,
    embeddings: &EmbeddingMatrix,
    constraints: &ConstraintSet,
) -> Result<(Vec<Real>, Matrix), SamplerError> {
    constraints.check_against(circuit)?;
    let kernel = LossKernel::new(circuit, constraints, &embeddings.cone_mask);
    let n = embeddings.inputs();
    let mut grad = Matrix::zeros(embeddings.batch(), n);
    let loss = kernel.eval(
        embeddings.values.as_slice(),
        n,
        &mut KernelWork::default(),
        &mut grad.data,
    )?;
    Ok((loss, grad))
}

/// `V <- V - rate * grad` on the cone columns.
pub fn gd_step(embeddings: &mut EmbeddingMatrix, grad: &Matrix, rate: Real) {
    assert_eq!(
        (grad.rows(), grad.cols()),
        (embeddings.batch(), embeddings.inputs()),
        "gradient shape"
    );
    let n = embeddings.inputs();
    let cone = embeddings.cone_columns();
    for s in 0..embeddings.batch() {
        for &j in &cone {
            embeddings.values.data[s * n + j] -= rate * grad.data[s * n + j];
        }
    }
}

/// Hard assignment per sample: 1 iff `sigmoid(v) >= 0.5`, i.e. `v >= 0`.
pub fn harden(embeddings: &EmbeddingMatrix) -> Vec<Vec<bool>> {
    (0..embeddings.batch())
        .map(|s| embeddings.values.row(s).iter().map(|&v| v >= 0.0).collect())
        .collect()
}
