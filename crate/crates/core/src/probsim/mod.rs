//! Batched relaxed evaluation of a circuit and its reverse pass.
//!
//! Every matrix here is stored lane-major: one contiguous `Vec` per net or
//! per input, indexed by sample. A gate kernel then streams over whole
//! lanes, and samples never interact, so any split of the batch gives
//! bitwise identical results.

mod gate;

use thiserror::Error;

use crate::netlist::{Circuit, NetId};
use crate::Real;

pub use gate::{gate_grad, gate_prob, GateError};
use gate::{backward_lanes, forward_lanes, GradScratch};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProbError {
    #[error("expected {expected} lanes, got {got}")]
    Width { expected: usize, got: usize },
    #[error("lane {lane} has {got} samples, expected {expected}")]
    Ragged {
        lane: usize,
        expected: usize,
        got: usize,
    },
    #[error("net index {0} is not in the circuit")]
    UnknownNet(usize),
    #[error("tape has {got} rows but the circuit has {expected} nets")]
    TapeMismatch { expected: usize, got: usize },
}

/// `batch x width` matrix stored as `width` lanes of `batch` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Lanes {
    batch: usize,
    lanes: Vec<Vec<Real>>,
}

/// Input probabilities, one lane per primary input.
pub type ProbBatch = Lanes;
/// Loss gradients, one lane per primary input.
pub type GradBatch = Lanes;
/// Seed gradients `dL/dp` for pinned nets, one lane per pin.
pub type SeedBatch = Lanes;

impl Lanes {
    pub fn zeros(batch: usize, width: usize) -> Self {
        Lanes {
            batch,
            lanes: vec![vec![0.0; batch]; width],
        }
    }

    pub fn filled(batch: usize, width: usize, value: Real) -> Self {
        Lanes {
            batch,
            lanes: vec![vec![value; batch]; width],
        }
    }

    pub fn from_lanes(batch: usize, lanes: Vec<Vec<Real>>) -> Result<Self, ProbError> {
        if let Some((lane, l)) = lanes.iter().enumerate().find(|(_, l)| l.len() != batch) {
            return Err(ProbError::Ragged {
                lane,
                expected: batch,
                got: l.len(),
            });
        }
        Ok(Lanes { batch, lanes })
    }

    /// Builds from sample-major rows.
    pub fn from_rows(rows: &[Vec<Real>]) -> Result<Self, ProbError> {
        let width = rows.first().map_or(0, Vec::len);
        let mut m = Lanes::zeros(rows.len(), width);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(ProbError::Width {
                    expected: width,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.lanes[j][s] = v;
            }
        }
        Ok(m)
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn width(&self) -> usize {
        self.lanes.len()
    }

    pub fn lane(&self, j: usize) -> &[Real] {
        &self.lanes[j]
    }

    pub fn lane_mut(&mut self, j: usize) -> &mut [Real] {
        &mut self.lanes[j]
    }

    pub fn get(&self, sample: usize, j: usize) -> Real {
        self.lanes[j][sample]
    }

    pub fn set(&mut self, sample: usize, j: usize, v: Real) {
        self.lanes[j][sample] = v;
    }

    pub fn row(&self, sample: usize) -> Vec<Real> {
        self.lanes.iter().map(|l| l[sample]).collect()
    }
}

/// Every net's probability from one forward pass, one contiguous row per
/// net (indexed by `NetId::index`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProbTape {
    batch: usize,
    rows: Vec<Vec<Real>>,
}

impl ProbTape {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Probability lane of `net`. Empty for nets a restricted plan skipped.
    pub fn row(&self, net: NetId) -> &[Real] {
        &self.rows[net.index()]
    }

    /// `Y`: output lanes in primary-output order.
    pub fn outputs<'a>(&'a self, circuit: &'a Circuit) -> impl Iterator<Item = &'a [Real]> + 'a {
        circuit.outputs().iter().map(move |&o| self.row(o))
    }
}

/// Precomputed evaluation schedule: the topologically ordered gates whose
/// outputs feed a set of root nets.
#[derive(Clone, Debug)]
pub struct Plan<'c> {
    circuit: &'c Circuit,
    gates: Vec<usize>,
    live: Vec<bool>,
}

impl<'c> Plan<'c> {
    /// Schedule for every gate.
    pub fn full(circuit: &'c Circuit) -> Self {
        Plan {
            circuit,
            gates: circuit.topo_order().to_vec(),
            live: vec![true; circuit.net_count()],
        }
    }

    /// Schedule restricted to the transitive fan-in of `roots`.
    pub fn cone(circuit: &'c Circuit, roots: impl IntoIterator<Item = NetId>) -> Self {
        let live = crate::netlist::cone::fanin_nets(circuit, roots);
        let gates = circuit
            .topo_order()
            .iter()
            .copied()
            .filter(|&g| live[circuit.gates()[g].output.index()])
            .collect();
        Plan { circuit, gates, live }
    }

    pub fn circuit(&self) -> &'c Circuit {
        self.circuit
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Forward pass into a reusable tape. Rows of nets outside the plan are
    /// left empty.
    pub fn forward_into(&self, inputs: &ProbBatch, tape: &mut ProbTape) -> Result<(), ProbError> {
        let c = self.circuit;
        if inputs.width() != c.inputs().len() {
            return Err(ProbError::Width {
                expected: c.inputs().len(),
                got: inputs.width(),
            });
        }
        let batch = inputs.batch();
        tape.batch = batch;
        tape.rows.resize_with(c.net_count(), Vec::new);
        for (net, row) in tape.rows.iter_mut().enumerate() {
            row.clear();
            if self.live[net] {
                row.resize(batch, 0.0);
            }
        }
        for (j, &net) in c.inputs().iter().enumerate() {
            if self.live[net.index()] {
                tape.rows[net.index()].copy_from_slice(inputs.lane(j));
            }
        }
        for &g in &self.gates {
            let gate = &c.gates()[g];
            let mut out = std::mem::take(&mut tape.rows[gate.output.index()]);
            let ins: Vec<&[Real]> = gate.inputs.iter().map(|i| tape.rows[i.index()].as_slice()).collect();
            forward_lanes(gate.kind, &ins, &mut out);
            tape.rows[gate.output.index()] = out;
        }
        Ok(())
    }

    pub fn forward(&self, inputs: &ProbBatch) -> Result<ProbTape, ProbError> {
        let mut tape = ProbTape::default();
        self.forward_into(inputs, &mut tape)?;
        Ok(tape)
    }

    /// Reverse pass. `seeds` lane `k` is `dL/dp` of `pins[k]`; gradients are
    /// accumulated over every fanout path back to the primary inputs.
    /// Inputs outside the fan-in of `pins` receive exactly zero.
    pub fn backward_into(
        &self,
        tape: &ProbTape,
        pins: &[NetId],
        seeds: &SeedBatch,
        work: &mut BackwardWork,
        grads: &mut GradBatch,
    ) -> Result<(), ProbError> {
        let c = self.circuit;
        if tape.rows.len() != c.net_count() {
            return Err(ProbError::TapeMismatch {
                expected: c.net_count(),
                got: tape.rows.len(),
            });
        }
        if seeds.width() != pins.len() {
            return Err(ProbError::Width {
                expected: pins.len(),
                got: seeds.width(),
            });
        }
        if let Some(p) = pins.iter().find(|p| p.index() >= c.net_count()) {
            return Err(ProbError::UnknownNet(p.index()));
        }
        let batch = tape.batch;
        if seeds.batch() != batch {
            return Err(ProbError::Ragged {
                lane: 0,
                expected: batch,
                got: seeds.batch(),
            });
        }

        let reach = crate::netlist::cone::fanin_nets(c, pins.iter().copied());
        work.adj.resize_with(c.net_count(), Vec::new);
        for (net, a) in work.adj.iter_mut().enumerate() {
            a.clear();
            if reach[net] {
                a.resize(batch, 0.0);
            }
        }
        for (k, &p) in pins.iter().enumerate() {
            for (a, &s) in work.adj[p.index()].iter_mut().zip(seeds.lane(k)) {
                *a += s;
            }
        }

        let mut ins: Vec<&[Real]> = Vec::new();
        for &g in self.gates.iter().rev() {
            let gate = &c.gates()[g];
            if !reach[gate.output.index()] {
                continue;
            }
            if gate.inputs.iter().any(|i| tape.rows[i.index()].len() != batch) {
                // planned out of the forward pass; nothing to differentiate against
                return Err(ProbError::UnknownNet(gate.output.index()));
            }
            let out_adj = std::mem::take(&mut work.adj[gate.output.index()]);
            ins.clear();
            ins.extend(gate.inputs.iter().map(|i| tape.rows[i.index()].as_slice()));
            let adj = &mut work.adj;
            backward_lanes(gate.kind, &ins, &out_adj, &mut work.scratch, |i, d| {
                for (a, &v) in adj[gate.inputs[i].index()].iter_mut().zip(d) {
                    *a += v;
                }
            });
            work.adj[gate.output.index()] = out_adj;
        }

        grads.batch = batch;
        grads.lanes.resize_with(c.inputs().len(), Vec::new);
        for (j, &net) in c.inputs().iter().enumerate() {
            let lane = &mut grads.lanes[j];
            lane.clear();
            if reach[net.index()] {
                lane.extend_from_slice(&work.adj[net.index()]);
            } else {
                lane.resize(batch, 0.0);
            }
        }
        Ok(())
    }

    pub fn backward(&self, tape: &ProbTape, pins: &[NetId], seeds: &SeedBatch) -> Result<GradBatch, ProbError> {
        let mut work = BackwardWork::default();
        let mut grads = Lanes::zeros(0, 0);
        self.backward_into(tape, pins, seeds, &mut work, &mut grads)?;
        Ok(grads)
    }
}

/// Reusable adjoint storage for [`Plan::backward_into`].
#[derive(Default)]
pub struct BackwardWork {
    adj: Vec<Vec<Real>>,
    scratch: GradScratch,
}

/// Relaxed forward pass over every gate.
pub fn forward(circuit: &Circuit, inputs: &ProbBatch) -> Result<ProbTape, ProbError> {
    Plan::full(circuit).forward(inputs)
}

/// Reverse pass from seed gradients on `pins` to the primary inputs.
pub fn backward(
    circuit: &Circuit,
    tape: &ProbTape,
    pins: &[NetId],
    seeds: &SeedBatch,
) -> Result<GradBatch, ProbError> {
    Plan::full(circuit).backward(tape, pins, seeds)
}
