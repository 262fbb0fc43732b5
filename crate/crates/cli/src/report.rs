use std::time::Instant;

use relaxsat::sampler::{IterationStats, SamplerError};
use relaxsat::{run_sampling, Circuit, ConstraintSet, SamplerConfig, SolutionSet};
use serde::Serialize;

/// JSON stats of one sampling run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub circuit: String,
    pub config: SamplerConfig,
    pub iterations: Vec<IterationStats>,
    pub total_unique: usize,
    pub wall_ms: f64,
    /// Unique solutions per second of wall time.
    pub throughput_per_s: f64,
    /// `solutions_found` or `no_solutions`.
    pub status: &'static str,
}

pub fn throughput(unique: usize, ms: f64) -> f64 {
    if ms > 0.0 {
        unique as f64 / (ms / 1e3)
    } else {
        0.0
    }
}

pub fn sample(
    name: &str,
    circuit: &Circuit,
    pins: &ConstraintSet,
    config: &SamplerConfig,
) -> Result<(SolutionSet, RunReport), SamplerError> {
    let start = Instant::now();
    let set = run_sampling(circuit, pins, config)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = RunReport {
        circuit: name.to_owned(),
        config: config.clone(),
        iterations: set.stats.clone(),
        total_unique: set.len(),
        wall_ms,
        throughput_per_s: throughput(set.len(), wall_ms),
        status: if set.is_empty() { "no_solutions" } else { "solutions_found" },
    };
    Ok((set, report))
}
