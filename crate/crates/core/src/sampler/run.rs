use std::time::Instant;

use rayon::prelude::*;

use super::{
    cone_mask, fill_row, KernelWork, LossKernel, SamplerConfig, SamplerError, SolutionSet,
    IterationStats,
};
use crate::netlist::{eval_discrete, simulate_packed, Circuit, ConstraintSet};
use crate::probsim::ProbError;
use crate::Real;

/// Samples per work unit. A multiple of 64 so verification words never
/// straddle blocks. Block boundaries depend only on the batch size, which
/// keeps results identical for any thread count.
const BLOCK: usize = 1024;

// identity unless built with the `f32` feature
#[allow(clippy::useless_conversion)]
fn widen(x: Real) -> f64 {
    f64::from(x)
}

struct BlockOut {
    loss_sum: f64,
    hits: Vec<Vec<bool>>,
}

/// Runs `config.iterations` GD steps over a batch of `config.batch_size`
/// samples and collects every distinct hardened assignment that satisfies
/// all pins.
pub fn run_sampling(
    circuit: &Circuit,
    constraints: &ConstraintSet,
    config: &SamplerConfig,
) -> Result<SolutionSet, SamplerError> {
    config.validate()?;
    constraints.check_against(circuit)?;
    let mask = cone_mask(circuit, constraints);
    if !mask.iter().any(|&m| m) {
        return Err(SamplerError::EmptyCone);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| SamplerError::Pool(e.to_string()))?;
    pool.install(|| run_in_pool(circuit, constraints, config, mask))
}

fn run_in_pool(
    circuit: &Circuit,
    constraints: &ConstraintSet,
    config: &SamplerConfig,
    mask: Vec<bool>,
) -> Result<SolutionSet, SamplerError> {
    let start = Instant::now();
    let n = circuit.inputs().len();
    let b = config.batch_size;
    let names = circuit
        .inputs()
        .iter()
        .map(|&i| circuit.net_name(i).to_owned())
        .collect();
    let kernel = LossKernel::new(circuit, constraints, &mask);
    let mut solutions = SolutionSet::new(names, kernel.cone().to_vec(), config.dedup_scope);

    let mut v: Vec<Real> = vec![0.0; b * n];
    let range = config.init_range as Real;
    v.par_chunks_mut(n)
        .enumerate()
        .for_each(|(s, row)| fill_row(config.seed, s, range, row));

    let pins: Vec<(usize, bool)> = constraints.iter().map(|(net, t)| (net.index(), t)).collect();
    let rate = config.learning_rate as Real;

    for iteration in 1..=config.iterations {
        let outs: Vec<Result<BlockOut, ProbError>> = v
            .par_chunks_mut(BLOCK * n)
            .map_init(
                || (KernelWork::default(), Vec::new()),
                |(work, grad), rows| {
                    grad.clear();
                    grad.resize(rows.len(), 0.0);
                    let loss = kernel.eval(rows, n, work, grad)?;
                    for s in 0..rows.len() / n {
                        for &j in kernel.cone() {
                            rows[s * n + j] -= rate * grad[s * n + j];
                        }
                    }
                    Ok(BlockOut {
                        loss_sum: loss.iter().map(|&l| widen(l)).sum(),
                        hits: verify_block(circuit, &pins, rows, n),
                    })
                },
            )
            .collect();

        let before = solutions.len();
        let mut loss_sum = 0.0;
        for out in outs {
            let out = out?;
            loss_sum += out.loss_sum;
            for hit in &out.hits {
                solutions.insert(hit);
            }
        }
        solutions.stats.push(IterationStats {
            iteration,
            cumulative_unique: solutions.len(),
            new_unique: solutions.len() - before,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            loss_mean: loss_sum / b as f64,
        });
    }
    Ok(solutions)
}

/// Hardens every row and keeps those the exact simulator accepts.
fn verify_block(circuit: &Circuit, pins: &[(usize, bool)], rows: &[Real], n: usize) -> Vec<Vec<bool>> {
    let batch = rows.len() / n;
    let mut hits = Vec::new();
    let mut words = vec![0u64; n];
    for base in (0..batch).step_by(64) {
        let lanes = (batch - base).min(64);
        words.iter_mut().for_each(|w| *w = 0);
        for s in 0..lanes {
            let row = &rows[(base + s) * n..(base + s + 1) * n];
            for (w, &x) in words.iter_mut().zip(row) {
                *w |= u64::from(x >= 0.0) << s;
            }
        }
        let nets = simulate_packed(circuit, &words);
        let mut ok = if lanes == 64 { !0u64 } else { (1u64 << lanes) - 1 };
        for &(net, t) in pins {
            ok &= if t { nets[net] } else { !nets[net] };
        }
        while ok != 0 {
            let s = ok.trailing_zeros() as usize;
            ok &= ok - 1;
            let bits: Vec<bool> = words.iter().map(|w| w >> s & 1 == 1).collect();
            debug_assert!(eval_discrete(circuit, &bits)
                .is_ok_and(|vals| pins.iter().all(|&(net, t)| vals[net] == t)));
            hits.push(bits);
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::super::DedupScope;
    use super::*;
    use crate::frontend::{parse_bench, parse_verilog};
    use crate::netlist::tests::c15;

    fn pins(c: &Circuit, list: &[(&str, bool)]) -> ConstraintSet {
        let mut p = ConstraintSet::new();
        for &(n, v) in list {
            p.pin(c.find_net(n).unwrap(), v).unwrap();
        }
        p
    }

    fn brute_force(c: &Circuit, p: &ConstraintSet, cone: &[usize]) -> usize {
        let n = c.inputs().len();
        let mut seen = std::collections::HashSet::new();
        for m in 0..1u64 << n {
            let bits: Vec<bool> = (0..n).map(|j| m >> j & 1 == 1).collect();
            if p.satisfied_by(&eval_discrete(c, &bits).unwrap()) {
                seen.insert(cone.iter().map(|&j| bits[j]).collect::<Vec<_>>());
            }
        }
        seen.len()
    }

    #[test]
    fn c17_recovers_all_solutions() {
        let c = parse_bench(include_str!("../../tests/fixtures/c17.bench")).unwrap();
        let p = pins(&c, &[("23", true)]);
        let cfg = SamplerConfig {
            batch_size: 10_000,
            seed: 1,
            dedup_scope: DedupScope::AllInputs,
            ..Default::default()
        };
        let all_pos: Vec<usize> = (0..5).collect();
        let full = run_sampling(&c, &p, &cfg).unwrap();
        assert_eq!(brute_force(&c, &p, &all_pos), 18);
        assert_eq!(full.len(), 18);
        for row in full.iter() {
            assert!(p.satisfied_by(&eval_discrete(&c, &row).unwrap()));
        }
        let st = &full.stats;
        assert_eq!(st.len(), 10);
        assert!(st.windows(2).all(|w| w[0].cumulative_unique <= w[1].cumulative_unique));
        assert_eq!(st.iter().map(|s| s.new_unique).sum::<usize>(), 18);

        // input 1 only feeds the first output, so the cone has 4 inputs
        let cone = run_sampling(&c, &p, &SamplerConfig { dedup_scope: DedupScope::Cone, ..cfg }).unwrap();
        assert_eq!(cone.cone_names(), ["2", "3", "6", "7"]);
        assert_eq!(cone.len(), brute_force(&c, &p, cone.cone_positions()));
        assert_eq!(cone.len(), 9);
    }

    #[test]
    fn same_seed_same_result_any_thread_count() {
        let c = c15();
        let p = pins(&c, &[("G19", true)]);
        let cfg = SamplerConfig {
            batch_size: 3000,
            iterations: 3,
            seed: 9,
            threads: 1,
            ..Default::default()
        };
        let a: Vec<_> = run_sampling(&c, &p, &cfg).unwrap().iter().collect();
        let b: Vec<_> = run_sampling(&c, &p, &SamplerConfig { threads: 4, ..cfg.clone() })
            .unwrap()
            .iter()
            .collect();
        assert_eq!(a, b);
        let other: Vec<_> = run_sampling(&c, &p, &SamplerConfig { seed: 10, ..cfg })
            .unwrap()
            .iter()
            .collect();
        assert_ne!(a, other);
    }

    #[test]
    fn c15_dedup_scopes() {
        let c = c15();
        let p = pins(&c, &[("G19", true)]);
        let cfg = SamplerConfig {
            batch_size: 2000,
            iterations: 4,
            ..Default::default()
        };
        let cone = run_sampling(&c, &p, &cfg).unwrap();
        // G19 = (G3 xor G6) and G7
        assert_eq!(cone.len(), 2);
        assert_eq!(cone.cone_names(), ["G3", "G6", "G7"]);
        let all = run_sampling(
            &c,
            &p,
            &SamplerConfig {
                dedup_scope: DedupScope::AllInputs,
                ..cfg
            },
        )
        .unwrap();
        // don't-cares G1, G2 stay at their initial signs
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn unsatisfiable_pin_gives_empty_set() {
        let c = parse_verilog(
            "module k(a, y); input a; output y; wire na; not N(na, a); and A(y, a, na); endmodule",
        )
        .unwrap();
        let p = pins(&c, &[("y", true)]);
        let set = run_sampling(&c, &p, &SamplerConfig { batch_size: 256, ..Default::default() }).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.stats.len(), 10);
    }

    #[test]
    fn partial_blocks_are_verified() {
        let c = c15();
        let p = pins(&c, &[("G19", true), ("G22", false)]);
        let cfg = SamplerConfig {
            batch_size: BLOCK + 37,
            ..Default::default()
        };
        let set = run_sampling(&c, &p, &cfg).unwrap();
        let want = brute_force(&c, &p, set.cone_positions());
        assert_eq!(set.len(), want);
    }
}
