//! Small DPLL solver used to enumerate CNF models for cross-checks. Fine for
//! tens of projected variables, not meant for real instances.

use super::CnfFormula;

struct Solver<'a> {
    clauses: &'a [Vec<i32>],
    /// 0 unassigned, 1 true, -1 false; indexed by variable.
    value: Vec<i8>,
    trail: Vec<u32>,
}

impl<'a> Solver<'a> {
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 { v } else { -v }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l.unsigned_abs());
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v as usize] = 0;
        }
    }

    /// Unit propagation to fixpoint. False on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for cl in self.clauses {
                let mut unassigned = None;
                let mut count = 0;
                let mut sat = false;
                for &l in cl {
                    match self.lit_value(l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            count += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match count {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.unwrap());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn solve(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return false;
        }
        let free = (1..self.value.len()).find(|&v| self.value[v] == 0);
        let Some(v) = free else { return true };
        for l in [v as i32, -(v as i32)] {
            let m = self.trail.len();
            self.assign(l);
            if self.solve() {
                return true;
            }
            self.undo(m);
        }
        self.undo(mark);
        false
    }
}

/// Whether the formula has a model.
pub fn is_satisfiable(cnf: &CnfFormula) -> bool {
    let mut s = Solver {
        clauses: &cnf.clauses,
        value: vec![0; cnf.var_count as usize + 1],
        trail: Vec::new(),
    };
    s.solve()
}

/// Every distinct assignment to `vars` that extends to a model, in
/// lexicographic order with `false < true`.
pub fn enumerate_projected(cnf: &CnfFormula, vars: &[u32]) -> Vec<Vec<bool>> {
    let mut s = Solver {
        clauses: &cnf.clauses,
        value: vec![0; cnf.var_count as usize + 1],
        trail: Vec::new(),
    };
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    walk(&mut s, vars, &mut prefix, &mut out);
    out
}

fn walk(s: &mut Solver, vars: &[u32], prefix: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    let mark = s.trail.len();
    if !s.propagate() {
        s.undo(mark);
        return;
    }
    match vars.split_first() {
        None => {
            let m = s.trail.len();
            if s.solve() {
                out.push(prefix.clone());
            }
            s.undo(m);
        }
        Some((&v, rest)) => {
            for b in [false, true] {
                let current = s.value[v as usize];
                if current != 0 && (current == 1) != b {
                    continue;
                }
                let m = s.trail.len();
                if current == 0 {
                    s.assign(if b { v as i32 } else { -(v as i32) });
                }
                prefix.push(b);
                walk(s, rest, prefix, out);
                prefix.pop();
                s.undo(m);
            }
        }
    }
    s.undo(mark);
}
