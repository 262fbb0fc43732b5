//! Differentiable CircuitSAT sampling.
//!
//! A gate-level circuit is relaxed into a probabilistic model (each gate
//! maps input probabilities to an output probability), a batch of input
//! embeddings is trained by gradient descent towards pinned net values, and
//! every hardened assignment is checked against the exact Boolean simulator
//! before it is kept.
//!
//! * [`netlist`]: circuit model, validation, exact simulation, support cones.
//! * [`frontend`]: Verilog / BLIF / `.bench` readers and writers.
//! * [`probsim`]: batched relaxed forward and reverse passes.
//! * [`sampler`]: embeddings, loss, GD, hardening and solution harvesting.
//! * [`cnf`]: Tseytin encoding, DIMACS I/O and a small model enumerator.

pub mod cnf;
pub mod frontend;
pub mod netlist;
pub mod probsim;
pub mod sampler;

/// Floating-point type of the relaxation.
#[cfg(not(feature = "f32"))]
pub type Real = f64;
/// Floating-point type of the relaxation.
#[cfg(feature = "f32")]
pub type Real = f32;

pub use cnf::{parse_dimacs, tseytin_encode, write_dimacs, CnfFormula};
pub use frontend::{parse, SourceFormat};
pub use netlist::{Circuit, ConstraintSet, GateKind, NetId, Netlist};
pub use sampler::{run_sampling, DedupScope, SamplerConfig, SolutionSet};
