use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::{Netlist, NetlistError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("combinational cycle through nets {}", .nets.join(" -> "))]
    Cycle { nets: Vec<String> },
    #[error("net `{net}` has multiple drivers: {}", .drivers.join(", "))]
    MultipleDrivers { net: String, drivers: Vec<String> },
    #[error("net `{net}` read by {reader} is neither a primary input nor driven by a gate")]
    Dangling { net: String, reader: String },
    #[error("gate `{gate}` ({kind}) has fan-in {fan_in}")]
    BadFanIn {
        gate: String,
        kind: String,
        fan_in: usize,
    },
    #[error("net `{net}` is declared as a primary {port} more than once")]
    DuplicatePort { net: String, port: &'static str },
}

const PRIMARY_INPUT: &str = "<primary input>";

pub(super) fn validate(n: &Netlist) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let nets = n.net_count();

    let mut drivers: Vec<Vec<String>> = vec![Vec::new(); nets];
    let mut seen_input = vec![false; nets];
    for &i in &n.inputs {
        if seen_input[i.index()] {
            diags.push(Diagnostic::DuplicatePort {
                net: n.net_name(i).to_owned(),
                port: "input",
            });
            continue;
        }
        seen_input[i.index()] = true;
        drivers[i.index()].push(PRIMARY_INPUT.to_owned());
    }
    let mut seen_output = vec![false; nets];
    for &o in &n.outputs {
        if std::mem::replace(&mut seen_output[o.index()], true) {
            diags.push(Diagnostic::DuplicatePort {
                net: n.net_name(o).to_owned(),
                port: "output",
            });
        }
    }

    for gate in &n.gates {
        if !gate.kind.accepts_fan_in(gate.inputs.len()) {
            diags.push(Diagnostic::BadFanIn {
                gate: gate.name.clone(),
                kind: gate.kind.to_string(),
                fan_in: gate.inputs.len(),
            });
        }
        drivers[gate.output.index()].push(gate.name.clone());
    }

    for (net, d) in drivers.iter().enumerate() {
        if d.len() > 1 {
            diags.push(Diagnostic::MultipleDrivers {
                net: n.net_names[net].clone(),
                drivers: d.clone(),
            });
        }
    }

    for gate in &n.gates {
        for &i in &gate.inputs {
            if drivers[i.index()].is_empty() {
                diags.push(Diagnostic::Dangling {
                    net: n.net_name(i).to_owned(),
                    reader: format!("gate `{}`", gate.name),
                });
            }
        }
    }
    for &o in &n.outputs {
        if drivers[o.index()].is_empty() {
            diags.push(Diagnostic::Dangling {
                net: n.net_name(o).to_owned(),
                reader: "an output port".to_owned(),
            });
        }
    }

    if let Err(NetlistError::Cycle(nets)) = topo_order(n) {
        diags.push(Diagnostic::Cycle { nets });
    }
    diags
}

/// Kahn's algorithm; among ready gates the lowest index (source order) goes
/// first. Nets with several drivers are resolved to their first driver.
pub fn topo_order(n: &Netlist) -> Result<Vec<usize>, NetlistError> {
    let nets = n.net_count();
    let mut driver: Vec<Option<usize>> = vec![None; nets];
    for (g, gate) in n.gates.iter().enumerate() {
        driver[gate.output.index()].get_or_insert(g);
    }

    let mut pending = vec![0usize; n.gates.len()];
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); n.gates.len()];
    for (g, gate) in n.gates.iter().enumerate() {
        for &i in &gate.inputs {
            if let Some(d) = driver[i.index()] {
                pending[g] += 1;
                readers[d].push(g);
            }
        }
    }

    let mut ready: BinaryHeap<Reverse<usize>> = pending
        .iter()
        .enumerate()
        .filter(|(_, &p)| p == 0)
        .map(|(g, _)| Reverse(g))
        .collect();
    let mut order = Vec::with_capacity(n.gates.len());
    while let Some(Reverse(g)) = ready.pop() {
        order.push(g);
        for &r in &readers[g] {
            pending[r] -= 1;
            if pending[r] == 0 {
                ready.push(Reverse(r));
            }
        }
    }

    if order.len() == n.gates.len() {
        return Ok(order);
    }
    Err(NetlistError::Cycle(find_cycle(n, &driver, &pending)))
}

/// Walks backwards from an unplaced gate through unplaced drivers until a
/// gate repeats; returns the net names around that loop.
fn find_cycle(n: &Netlist, driver: &[Option<usize>], pending: &[usize]) -> Vec<String> {
    let start = pending.iter().position(|&p| p > 0).expect("some gate is unplaced");
    let mut visited_at = vec![usize::MAX; n.gates.len()];
    let mut path = Vec::new();
    let mut g = start;
    while visited_at[g] == usize::MAX {
        visited_at[g] = path.len();
        path.push(g);
        g = n.gates[g]
            .inputs
            .iter()
            .filter_map(|i| driver[i.index()])
            .find(|&d| pending[d] > 0)
            .expect("unplaced gate has an unplaced driver");
    }
    let mut cycle: Vec<String> = path[visited_at[g]..]
        .iter()
        .rev()
        .map(|&g| n.net_name(n.gates[g].output).to_owned())
        .collect();
    cycle.push(cycle[0].clone());
    cycle
}
