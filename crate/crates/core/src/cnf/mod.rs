//! Tseytin encoding to CNF and DIMACS I/O.

pub mod dpll;

use std::fmt::Write;

use thiserror::Error;

use crate::netlist::{Circuit, ConstraintSet, GateKind, NetId};

/// A CNF formula over variables `1..=var_count`. Literals are signed
/// variable indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub var_count: u32,
    pub clauses: Vec<Vec<i32>>,
    /// Variable of each net, indexed by `NetId::index`. Empty for parsed
    /// formulas.
    pub var_map: Vec<u32>,
    pub inputs: Vec<(String, u32)>,
    pub outputs: Vec<(String, u32)>,
}

impl CnfFormula {
    pub fn var(&self, net: NetId) -> u32 {
        self.var_map[net.index()]
    }

    pub fn input_vars(&self) -> Vec<u32> {
        self.inputs.iter().map(|&(_, v)| v).collect()
    }

    /// Whether `model[v - 1]` (value of variable `v`) satisfies every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|cl| {
            cl.iter()
                .any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Model over all variables from a net valuation. Auxiliary chain
    /// variables are recomputed from their definitions.
    pub fn model_from_nets(&self, circuit: &Circuit, net_values: &[bool]) -> Vec<bool> {
        let mut model = vec![false; self.var_count as usize];
        for (net, &v) in self.var_map.iter().enumerate() {
            model[v as usize - 1] = net_values[net];
        }
        let mut aux = self.var_map.len() as u32;
        for g in circuit.gates() {
            if matches!(g.kind, GateKind::Xor | GateKind::Xnor) && g.inputs.len() > 2 {
                let mut acc = net_values[g.inputs[0].index()];
                for i in &g.inputs[1..g.inputs.len() - 1] {
                    acc ^= net_values[i.index()];
                    aux += 1;
                    model[aux as usize - 1] = acc;
                }
            }
        }
        model
    }
}

/// `y <-> f(ins)` for one gate. Pushes clauses and may allocate aux vars.
fn encode_gate(kind: GateKind, y: i32, ins: &[i32], next_var: &mut u32, out: &mut Vec<Vec<i32>>) {
    match kind {
        GateKind::Const0 => out.push(vec![-y]),
        GateKind::Const1 => out.push(vec![y]),
        GateKind::Buf => {
            out.push(vec![-ins[0], y]);
            out.push(vec![ins[0], -y]);
        }
        GateKind::Not => {
            out.push(vec![-ins[0], -y]);
            out.push(vec![ins[0], y]);
        }
        GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
            // AND form: z <-> and(x); OR is AND over negated literals and
            // output, NAND/NOR negate the output.
            let (neg_in, neg_out) = match kind {
                GateKind::And => (false, false),
                GateKind::Nand => (false, true),
                GateKind::Or => (true, true),
                _ => (true, false),
            };
            let x: Vec<i32> = ins.iter().map(|&l| if neg_in { -l } else { l }).collect();
            let z = if neg_out { -y } else { y };
            for &xi in &x {
                out.push(vec![-z, xi]);
            }
            let mut long: Vec<i32> = x.iter().map(|&xi| -xi).collect();
            long.push(z);
            out.push(long);
        }
        GateKind::Xor | GateKind::Xnor => {
            let mut acc = ins[0];
            for (k, &b) in ins[1..].iter().enumerate() {
                let last = k + 2 == ins.len();
                let z = if last {
                    if kind == GateKind::Xnor { -y } else { y }
                } else {
                    *next_var += 1;
                    *next_var as i32
                };
                out.push(vec![-acc, -b, -z]);
                out.push(vec![acc, b, -z]);
                out.push(vec![acc, -b, z]);
                out.push(vec![-acc, b, z]);
                acc = z;
            }
        }
    }
}

/// One variable per net (`index + 1`), auxiliaries after that, full
/// biconditional gate clauses, and one unit clause per pin.
pub fn tseytin_encode(circuit: &Circuit, constraints: &ConstraintSet) -> CnfFormula {
    let var_map: Vec<u32> = (1..=circuit.net_count() as u32).collect();
    let mut next_var = circuit.net_count() as u32;
    let mut clauses = Vec::new();
    let lit = |n: NetId| var_map[n.index()] as i32;
    for g in circuit.gates() {
        let ins: Vec<i32> = g.inputs.iter().map(|&i| lit(i)).collect();
        encode_gate(g.kind, lit(g.output), &ins, &mut next_var, &mut clauses);
    }
    for (net, value) in constraints.iter() {
        clauses.push(vec![if value { lit(net) } else { -lit(net) }]);
    }
    let named = |ids: &[NetId]| -> Vec<(String, u32)> {
        ids.iter()
            .map(|&n| (circuit.net_name(n).to_owned(), var_map[n.index()]))
            .collect()
    };
    CnfFormula {
        var_count: next_var,
        inputs: named(circuit.inputs()),
        outputs: named(circuit.outputs()),
        clauses,
        var_map,
    }
}

pub fn write_dimacs(cnf: &CnfFormula) -> String {
    let mut out = String::new();
    for (name, v) in &cnf.inputs {
        let _ = writeln!(out, "c input {name} {v}");
    }
    for (name, v) in &cnf.outputs {
        let _ = writeln!(out, "c output {name} {v}");
    }
    let _ = write!(out, "p cnf {} {}", cnf.var_count, cnf.clauses.len());
    for cl in &cnf.clauses {
        out.push('\n');
        for l in cl {
            let _ = write!(out, "{l} ");
        }
        out.push('0');
    }
    out.push('\n');
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// Parses DIMACS CNF, including the `c input` / `c output` comments
/// written by [`write_dimacs`].
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut cnf = CnfFormula::default();
    let mut declared = None;
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let syntax = |message: String| DimacsError::Syntax { line, message };
        let words: Vec<&str> = raw.split_whitespace().collect();
        match words.first() {
            None => continue,
            Some(&"c") => {
                if let [_, kind @ ("input" | "output"), name, var] = words[..] {
                    let v = var.parse().map_err(|_| syntax(format!("bad variable `{var}`")))?;
                    let list = if kind == "input" { &mut cnf.inputs } else { &mut cnf.outputs };
                    list.push((name.to_owned(), v));
                }
            }
            Some(&"p") => {
                let [_, "cnf", v, c] = words[..] else {
                    return Err(syntax("expected `p cnf <vars> <clauses>`".into()));
                };
                cnf.var_count = v.parse().map_err(|_| syntax(format!("bad count `{v}`")))?;
                declared = Some(c.parse().map_err(|_| syntax(format!("bad count `{c}`")))?);
            }
            Some(_) => {
                if declared.is_none() {
                    return Err(DimacsError::MissingHeader);
                }
                for w in words {
                    let l: i32 = w.parse().map_err(|_| syntax(format!("bad literal `{w}`")))?;
                    if l == 0 {
                        cnf.clauses.push(std::mem::take(&mut current));
                    } else if l.unsigned_abs() > cnf.var_count {
                        return Err(syntax(format!("literal {l} exceeds variable count")));
                    } else {
                        current.push(l);
                    }
                }
            }
        }
    }
    let declared = declared.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    if declared != cnf.clauses.len() {
        return Err(DimacsError::ClauseCount {
            declared,
            found: cnf.clauses.len(),
        });
    }
    Ok(cnf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_bench, parse_verilog};
    use crate::netlist::{eval_discrete, tests::c15};

    fn pinned(c: &Circuit, list: &[(&str, bool)]) -> ConstraintSet {
        let mut p = ConstraintSet::new();
        for &(n, v) in list {
            p.pin(c.find_net(n).unwrap(), v).unwrap();
        }
        p
    }

    fn brute(c: &Circuit, p: &ConstraintSet) -> Vec<Vec<bool>> {
        let n = c.inputs().len();
        let mut out = Vec::new();
        for m in 0..1u32 << n {
            let bits: Vec<bool> = (0..n).map(|j| m >> j & 1 == 1).collect();
            if p.satisfied_by(&eval_discrete(c, &bits).unwrap()) {
                out.push(bits);
            }
        }
        out
    }

    fn projected_models(cnf: &CnfFormula) -> Vec<Vec<bool>> {
        let mut m = dpll::enumerate_projected(cnf, &cnf.input_vars());
        m.sort();
        m
    }

    fn sorted(mut v: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
        v.sort();
        v
    }

    #[test]
    fn and_gate_counts_and_truth_table() {
        let c = parse_verilog("module t(a,b,y); input a,b; output y; and A(y,a,b); endmodule").unwrap();
        let cnf = tseytin_encode(&c, &ConstraintSet::new());
        assert_eq!((cnf.var_count, cnf.clauses.len()), (3, 3));
        for m in 0..8u32 {
            let model: Vec<bool> = (0..3).map(|j| m >> j & 1 == 1).collect();
            assert_eq!(cnf.satisfied_by(&model), model[2] == (model[0] && model[1]), "{model:?}");
        }
    }

    #[test]
    fn not_pinned_high() {
        let c = parse_verilog("module t(a,y); input a; output y; not N(y,a); endmodule").unwrap();
        let cnf = tseytin_encode(&c, &pinned(&c, &[("y", true)]));
        assert_eq!(cnf.clauses, [vec![-1, -2], vec![1, 2], vec![2]]);
        assert_eq!(projected_models(&cnf), [vec![false]]);
        assert_eq!(
            write_dimacs(&cnf),
            "c input a 1\nc output y 2\np cnf 2 3\n-1 -2 0\n1 2 0\n2 0\n"
        );
    }

    #[test]
    fn empty_formula() {
        assert_eq!(write_dimacs(&CnfFormula::default()), "p cnf 0 0\n");
        assert_eq!(parse_dimacs("p cnf 0 0").unwrap(), CnfFormula::default());
    }

    #[test]
    fn c15_models_match_brute_force() {
        let c = c15();
        for pins in [vec![("G19", true)], vec![("G22", false)], vec![("G19", true), ("G22", true)], vec![]] {
            let p = pinned(&c, &pins);
            let cnf = tseytin_encode(&c, &p);
            assert_eq!(projected_models(&cnf), sorted(brute(&c, &p)), "{pins:?}");
        }
    }

    #[test]
    fn c17_models_match_brute_force() {
        let c = parse_bench(include_str!("../../tests/fixtures/c17.bench")).unwrap();
        let cnf = tseytin_encode(&c, &ConstraintSet::new());
        assert_eq!((cnf.var_count, cnf.clauses.len()), (11, 18));
        let p = pinned(&c, &[("23", true)]);
        let cnf = tseytin_encode(&c, &p);
        assert_eq!(cnf.clauses.len(), 19);
        let models = projected_models(&cnf);
        assert_eq!(models.len(), 18);
        assert_eq!(models, sorted(brute(&c, &p)));
    }

    #[test]
    fn wide_xor_and_xnor_chains() {
        let c = parse_verilog(
            "module t(a,b,c,d,y,z); input a,b,c,d; output y,z; xor X(y,a,b,c,d); xnor N(z,a,b,c); endmodule",
        )
        .unwrap();
        let cnf = tseytin_encode(&c, &ConstraintSet::new());
        // 6 nets + 2 aux for the 4-input XOR + 1 aux for the 3-input XNOR
        assert_eq!(cnf.var_count, 9);
        assert_eq!(cnf.clauses.len(), 4 * 3 + 4 * 2);
        for m in 0..16u32 {
            let bits: Vec<bool> = (0..4).map(|j| m >> j & 1 == 1).collect();
            let nets = eval_discrete(&c, &bits).unwrap();
            assert!(cnf.satisfied_by(&cnf.model_from_nets(&c, &nets)));
        }
        for pins in [[("y", true), ("z", false)], [("y", false), ("z", true)]] {
            let p = pinned(&c, &pins);
            assert_eq!(projected_models(&tseytin_encode(&c, &p)), sorted(brute(&c, &p)));
        }
    }

    #[test]
    fn constants_and_contradictory_pins() {
        let c = parse_verilog("module t(a,y); input a; output y; and A(y, a, 1'b0); endmodule").unwrap();
        let cnf = tseytin_encode(&c, &pinned(&c, &[("y", true)]));
        assert!(projected_models(&cnf).is_empty());
        let cnf = tseytin_encode(&c, &pinned(&c, &[("y", false)]));
        assert_eq!(projected_models(&cnf).len(), 2);
    }

    #[test]
    fn dimacs_round_trip() {
        let c = c15();
        let cnf = tseytin_encode(&c, &pinned(&c, &[("G19", true)]));
        let back = parse_dimacs(&write_dimacs(&cnf)).unwrap();
        assert_eq!(back.var_count, cnf.var_count);
        assert_eq!(back.clauses, cnf.clauses);
        assert_eq!(back.inputs, cnf.inputs);
        assert_eq!(back.outputs, cnf.outputs);
    }

    #[test]
    fn dimacs_errors() {
        assert_eq!(parse_dimacs("1 2 0\n"), Err(DimacsError::MissingHeader));
        assert!(matches!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(DimacsError::Syntax { line: 2, .. })));
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(DimacsError::ClauseCount { declared: 2, found: 1 })
        );
    }
}
