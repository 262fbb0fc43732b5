use std::collections::BTreeSet;

use proptest::prelude::*;
use relaxsat::cnf::dpll::enumerate_projected;
use relaxsat::frontend::{parse_bench, parse_blif, parse_verilog, write_bench, write_blif, write_verilog};
use relaxsat::netlist::{eval_discrete, simulate_packed, support_cone};
use relaxsat::probsim::{self, Lanes};
use relaxsat::sampler::{cone_mask, gd_step, loss_and_grad, EmbeddingMatrix, Matrix};
use relaxsat::{tseytin_encode, Circuit, ConstraintSet, DedupScope, GateKind, NetId, Netlist, SamplerConfig};

#[derive(Clone, Debug)]
struct GateSpec {
    kind: GateKind,
    picks: Vec<usize>,
}

fn gate_spec() -> impl Strategy<Value = GateSpec> {
    (0..GateKind::ALL.len(), prop::collection::vec(any::<usize>(), 4), 2usize..=4).prop_map(
        |(k, picks, wide)| {
            let kind = GateKind::ALL[k];
            let fan_in = match kind {
                GateKind::Not | GateKind::Buf => 1,
                GateKind::Const0 | GateKind::Const1 => 0,
                _ => wide,
            };
            GateSpec {
                kind,
                picks: picks[..fan_in].to_vec(),
            }
        },
    )
}

/// Random DAG: every gate reads earlier nets only; every gate output is a
/// primary output.
fn circuit(max_inputs: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_inputs, prop::collection::vec(gate_spec(), 1..=max_gates)).prop_map(|(n, specs)| {
        let mut nl = Netlist::new("rand");
        let mut nets: Vec<NetId> = (0..n).map(|i| nl.add_input(&format!("i{i}"))).collect();
        for (g, spec) in specs.iter().enumerate() {
            let y = nl.add_output(&format!("g{g}"));
            let ins = spec.picks.iter().map(|&p| nets[p % nets.len()]).collect();
            nl.add_gate(spec.kind, format!("u{g}"), y, ins);
            nets.push(y);
        }
        nl.into_circuit().unwrap()
    })
}

fn bits(m: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| m >> j & 1 == 1).collect()
}

/// Recursive evaluation straight from the driver table, for comparison
/// with the topological evaluator.
fn naive_eval(c: &Circuit, assignment: &[bool], net: NetId) -> bool {
    match c.driver(net) {
        None => assignment[c.input_position(net).unwrap()],
        Some(g) => {
            let gate = &c.gates()[g];
            let ins: Vec<bool> = gate.inputs.iter().map(|&i| naive_eval(c, assignment, i)).collect();
            gate.kind.eval(&ins)
        }
    }
}

/// Pins a few nets to the values they take under `witness`, so the
/// constraint set is satisfiable.
fn witness_pins(c: &Circuit, witness: &[bool], picks: &[usize]) -> ConstraintSet {
    let vals = eval_discrete(c, witness).unwrap();
    let mut p = ConstraintSet::new();
    for &k in picks {
        let net = c.outputs()[k % c.outputs().len()];
        if p.get(net).is_none() {
            p.pin(net, vals[net.index()]).unwrap();
        }
    }
    p
}

fn loss_at(c: &Circuit, probs: &[f64], pins: &ConstraintSet) -> f64 {
    let batch = Lanes::from_rows(&[probs.to_vec()]).unwrap();
    let tape = probsim::forward(c, &batch).unwrap();
    pins.iter()
        .map(|(n, t)| {
            let d = tape.row(n)[0] - f64::from(u8::from(t));
            d * d
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn topo_order_is_a_dependency_respecting_permutation(c in circuit(6, 24)) {
        let order = c.topo_order();
        let mut seen: Vec<usize> = order.to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..c.gates().len()).collect::<Vec<_>>());
        let mut pos = vec![0; order.len()];
        for (k, &g) in order.iter().enumerate() {
            pos[g] = k;
        }
        for (g, gate) in c.gates().iter().enumerate() {
            for &i in &gate.inputs {
                if let Some(d) = c.driver(i) {
                    prop_assert!(pos[d] < pos[g]);
                }
            }
        }
    }

    #[test]
    fn eval_matches_naive_and_packed(c in circuit(6, 20), m in any::<u64>()) {
        let n = c.inputs().len();
        let a = bits(m, n);
        let vals = eval_discrete(&c, &a).unwrap();
        for net in 0..c.net_count() {
            prop_assert_eq!(vals[net], naive_eval(&c, &a, NetId::new(net)));
        }
        // lane s of the packed run uses assignment m + s
        let words: Vec<u64> = (0..n)
            .map(|j| (0..64u64).fold(0, |w, s| w | ((m.wrapping_add(s) >> j & 1) << s)))
            .collect();
        let packed = simulate_packed(&c, &words);
        for s in [0u64, 17, 63] {
            let vs = eval_discrete(&c, &bits(m.wrapping_add(s), n)).unwrap();
            for net in 0..c.net_count() {
                prop_assert_eq!(packed[net] >> s & 1 == 1, vs[net]);
            }
        }
    }

    #[test]
    fn inputs_outside_cone_do_not_matter(
        c in circuit(6, 20),
        m in any::<u64>(),
        flip in any::<u64>(),
        picks in prop::collection::vec(any::<usize>(), 1..3),
    ) {
        let n = c.inputs().len();
        let a = bits(m, n);
        let pins = witness_pins(&c, &a, &picks);
        let cone: BTreeSet<usize> = support_cone(&c, &pins)
            .into_iter()
            .map(|i| c.input_position(i).unwrap())
            .collect();
        let b: Vec<bool> = (0..n)
            .map(|j| if cone.contains(&j) { a[j] } else { a[j] ^ (flip >> j & 1 == 1) })
            .collect();
        prop_assert!(pins.satisfied_by(&eval_discrete(&c, &b).unwrap()));
    }

    #[test]
    fn relaxation_is_exact_on_binary_points(c in circuit(6, 20), m in any::<u64>()) {
        let a = bits(m, c.inputs().len());
        let probs: Vec<f64> = a.iter().map(|&b| f64::from(u8::from(b))).collect();
        let tape = probsim::forward(&c, &Lanes::from_rows(&[probs]).unwrap()).unwrap();
        let vals = eval_discrete(&c, &a).unwrap();
        for net in 0..c.net_count() {
            prop_assert_eq!(tape.row(NetId::new(net))[0], f64::from(u8::from(vals[net])));
        }
    }

    #[test]
    fn probabilities_stay_in_unit_interval(
        c in circuit(6, 24),
        rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 6), 1..5),
    ) {
        let n = c.inputs().len();
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r[..n].to_vec()).collect();
        let tape = probsim::forward(&c, &Lanes::from_rows(&rows).unwrap()).unwrap();
        for net in 0..c.net_count() {
            for &p in tape.row(NetId::new(net)) {
                prop_assert!((0.0..=1.0).contains(&p), "{}", p);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences(
        c in circuit(5, 14),
        probs in prop::collection::vec(0.05f64..0.95, 5),
        m in any::<u64>(),
        picks in prop::collection::vec(any::<usize>(), 1..4),
    ) {
        let n = c.inputs().len();
        let probs = &probs[..n];
        let pins = witness_pins(&c, &bits(m, n), &picks);
        let nets: Vec<NetId> = pins.nets().collect();
        let tape = probsim::forward(&c, &Lanes::from_rows(&[probs.to_vec()]).unwrap()).unwrap();
        let seeds: Vec<f64> = pins
            .iter()
            .map(|(net, t)| 2.0 * (tape.row(net)[0] - f64::from(u8::from(t))))
            .collect();
        let grads = probsim::backward(&c, &tape, &nets, &Lanes::from_rows(&[seeds]).unwrap()).unwrap();
        let h = 1e-6;
        for j in 0..n {
            let mut up = probs.to_vec();
            let mut dn = probs.to_vec();
            up[j] += h;
            dn[j] -= h;
            let fd = (loss_at(&c, &up, &pins) - loss_at(&c, &dn, &pins)) / (2.0 * h);
            let an = grads.get(0, j);
            let err = (fd - an).abs();
            prop_assert!(err <= 1e-8 || err <= 1e-5 * an.abs().max(fd.abs()), "input {}: fd {} vs {}", j, fd, an);
        }
    }

    #[test]
    fn batch_permutation_permutes_results(
        c in circuit(5, 16),
        rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 5), 2..6),
        rot in 1usize..5,
    ) {
        let n = c.inputs().len();
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r[..n].to_vec()).collect();
        let mut rotated = rows.clone();
        let k = rot % rows.len();
        rotated.rotate_left(k);
        let a = probsim::forward(&c, &Lanes::from_rows(&rows).unwrap()).unwrap();
        let b = probsim::forward(&c, &Lanes::from_rows(&rotated).unwrap()).unwrap();
        let b_len = rows.len();
        for net in 0..c.net_count() {
            let (ra, rb) = (a.row(NetId::new(net)), b.row(NetId::new(net)));
            for s in 0..b_len {
                prop_assert_eq!(rb[s], ra[(s + k) % b_len]);
            }
        }
    }

    #[test]
    fn writers_round_trip(c in circuit(5, 16), vectors in prop::collection::vec(any::<u64>(), 8)) {
        let mut parsed = vec![parse_verilog(&write_verilog(&c)).unwrap(), parse_blif(&write_blif(&c)).unwrap()];
        let has_const = c.gates().iter().any(|g| g.kind.is_const());
        match write_bench(&c) {
            Ok(text) => parsed.push(parse_bench(&text).unwrap()),
            Err(_) => prop_assert!(has_const),
        }
        for other in &parsed {
            prop_assert_eq!(other.inputs().len(), c.inputs().len());
            prop_assert_eq!(other.outputs().len(), c.outputs().len());
            prop_assert_eq!(other.gates().len(), c.gates().len());
            for (g, h) in c.gates().iter().zip(other.gates()) {
                prop_assert_eq!(g.kind, h.kind);
                prop_assert_eq!(c.net_name(g.output), other.net_name(h.output));
            }
            for &m in &vectors {
                let a = bits(m, c.inputs().len());
                let va = eval_discrete(&c, &a).unwrap();
                let vb = eval_discrete(other, &a).unwrap();
                for (&x, &y) in c.outputs().iter().zip(other.outputs()) {
                    prop_assert_eq!(va[x.index()], vb[y.index()]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cnf_models_are_the_circuit_solutions(
        c in circuit(7, 18),
        m in any::<u64>(),
        picks in prop::collection::vec(any::<usize>(), 0..3),
        flip in any::<bool>(),
    ) {
        let n = c.inputs().len();
        let mut pins = witness_pins(&c, &bits(m, n), &picks);
        if flip && !pins.is_empty() {
            // possibly unsatisfiable variant
            let (net, v) = pins.iter().next().unwrap();
            let mut q = ConstraintSet::new();
            q.pin(net, !v).unwrap();
            pins = q;
        }
        let cnf = tseytin_encode(&c, &pins);
        let mut want = Vec::new();
        for a in 0..1u64 << n {
            let a = bits(a, n);
            let vals = eval_discrete(&c, &a).unwrap();
            if pins.satisfied_by(&vals) {
                prop_assert!(cnf.satisfied_by(&cnf.model_from_nets(&c, &vals)));
                want.push(a);
            }
        }
        let mut got = enumerate_projected(&cnf, &cnf.input_vars());
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn non_cone_columns_stay_frozen(
        c in circuit(6, 16),
        m in any::<u64>(),
        picks in prop::collection::vec(any::<usize>(), 1..3),
        init in prop::collection::vec(-2.0f64..2.0, 6 * 8),
    ) {
        let n = c.inputs().len();
        let pins = witness_pins(&c, &bits(m, n), &picks);
        let mask = cone_mask(&c, &pins);
        let rows: Vec<Vec<f64>> = init.chunks(6).map(|r| r[..n].to_vec()).collect();
        let mut v = EmbeddingMatrix::new(Matrix::from_rows(&rows), mask.clone());
        let before = v.clone();
        for _ in 0..5 {
            let (_, grad) = loss_and_grad(&c, &v, &pins).unwrap();
            gd_step(&mut v, &grad, 15.0);
        }
        for j in (0..n).filter(|&j| !mask[j]) {
            for s in 0..rows.len() {
                prop_assert_eq!(v.values.get(s, j).to_bits(), before.values.get(s, j).to_bits());
            }
        }
    }

    #[test]
    fn sampler_is_sound_and_recovers_small_cones(
        c in circuit(6, 14),
        m in any::<u64>(),
        picks in prop::collection::vec(any::<usize>(), 1..3),
        seed in any::<u64>(),
    ) {
        let n = c.inputs().len();
        let pins = witness_pins(&c, &bits(m, n), &picks);
        let mask = cone_mask(&c, &pins);
        let cone: Vec<usize> = (0..n).filter(|&j| mask[j]).collect();
        prop_assume!(!cone.is_empty());
        let cfg = SamplerConfig {
            batch_size: 64 << cone.len(),
            seed,
            dedup_scope: DedupScope::Cone,
            // at 15 one step flips most rows to the nearest basin and rare
            // assignments can be skipped; completeness is calibrated at 1
            learning_rate: 1.0,
            ..Default::default()
        };
        let set = relaxsat::run_sampling(&c, &pins, &cfg).unwrap();
        let mut want = BTreeSet::new();
        for a in 0..1u64 << n {
            let a = bits(a, n);
            if pins.satisfied_by(&eval_discrete(&c, &a).unwrap()) {
                want.insert(cone.iter().map(|&j| a[j]).collect::<Vec<_>>());
            }
        }
        for row in set.iter() {
            prop_assert!(pins.satisfied_by(&eval_discrete(&c, &row).unwrap()));
        }
        let got: BTreeSet<Vec<bool>> = set.cone_rows().collect();
        prop_assert_eq!(got.len(), set.len());
        prop_assert_eq!(got, want, "tuning regression: sampler missed brute-force solutions\n{}{}", write_verilog(&c), pins.to_text(&c));
        let st = &set.stats;
        prop_assert!(st.windows(2).all(|w| w[0].cumulative_unique <= w[1].cumulative_unique));
    }
}
