//! Combinational gate-level circuit model.
//!
//! A [`Netlist`] is the mutable, unchecked form produced by the parsers. It
//! becomes an immutable [`Circuit`] once [`Netlist::validate`] reports no
//! diagnostics; the circuit caches its topological order and driver table
//! and is what every other module consumes.

pub(crate) mod cone;
mod constraints;
mod sim;
mod validate;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use cone::support_cone;
pub use constraints::{ConstraintError, ConstraintSet};
pub use sim::{eval_discrete, simulate_packed};
pub use validate::{topo_order, Diagnostic};

/// Dense index of a net inside one circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(u32);

impl NetId {
    pub fn new(index: usize) -> Self {
        NetId(u32::try_from(index).expect("net index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Buf,
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    /// Constant driver, fan-in 0.
    Const0,
    /// Constant driver, fan-in 0.
    Const1,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::Not,
        GateKind::Buf,
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Const0,
        GateKind::Const1,
    ];

    /// Whether `fan_in` inputs is a legal arity for this kind.
    pub fn accepts_fan_in(self, fan_in: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => fan_in == 1,
            GateKind::Const0 | GateKind::Const1 => fan_in == 0,
            _ => fan_in >= 2,
        }
    }

    pub fn is_const(self) -> bool {
        matches!(self, GateKind::Const0 | GateKind::Const1)
    }

    /// Lower-case keyword, as used by Verilog primitives.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::Buf => "buf",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xor => "xor",
            GateKind::Xnor => "xnor",
            GateKind::Const0 => "const0",
            GateKind::Const1 => "const1",
        }
    }

    /// Boolean semantics. XOR is n-ary parity, XNOR its complement.
    pub fn eval(self, inputs: &[bool]) -> bool {
        match self {
            GateKind::Not => !inputs[0],
            GateKind::Buf => inputs[0],
            GateKind::And => inputs.iter().all(|&b| b),
            GateKind::Or => inputs.iter().any(|&b| b),
            GateKind::Nand => !inputs.iter().all(|&b| b),
            GateKind::Nor => !inputs.iter().any(|&b| b),
            GateKind::Xor => inputs.iter().fold(false, |acc, &b| acc ^ b),
            GateKind::Xnor => !inputs.iter().fold(false, |acc, &b| acc ^ b),
            GateKind::Const0 => false,
            GateKind::Const1 => true,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keyword().to_ascii_uppercase())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    /// Instance name from the source netlist (may be synthesized).
    pub name: String,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("invalid circuit:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("combinational cycle through nets {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("assignment is missing a value for primary input `{0}`")]
    MissingInput(String),
    #[error("assignment has {got} values but the circuit has {expected} primary inputs")]
    TooManyInputs { expected: usize, got: usize },
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  - {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Unchecked circuit description, as assembled by a parser.
#[derive(Clone, Debug, Default)]
pub struct Netlist {
    pub name: String,
    net_names: Vec<String>,
    by_name: HashMap<String, NetId>,
    pub inputs: Vec<NetId>,
    pub outputs: Vec<NetId>,
    pub gates: Vec<Gate>,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Netlist {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Returns the id for `name`, creating the net on first use.
    pub fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = NetId::new(self.net_names.len());
        self.net_names.push(name.to_owned());
        self.by_name.insert(name.to_owned(), id);
        id
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.by_name.get(name).copied()
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.net_names[id.index()]
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn add_input(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.inputs.push(id);
        id
    }

    pub fn add_output(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.outputs.push(id);
        id
    }

    pub fn add_gate(
        &mut self,
        kind: GateKind,
        name: impl Into<String>,
        output: NetId,
        inputs: Vec<NetId>,
    ) -> usize {
        self.gates.push(Gate {
            kind,
            name: name.into(),
            inputs,
            output,
        });
        self.gates.len() - 1
    }

    /// Checks every structural invariant. Empty means the netlist is a valid
    /// circuit.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate::validate(self)
    }

    pub fn into_circuit(self) -> Result<Circuit, NetlistError> {
        Circuit::new(self)
    }
}

/// Validated, immutable combinational circuit.
#[derive(Clone, Debug)]
pub struct Circuit {
    netlist: Netlist,
    topo: Vec<usize>,
    driver: Vec<Option<usize>>,
    input_pos: Vec<Option<usize>>,
}

impl Circuit {
    pub fn new(netlist: Netlist) -> Result<Self, NetlistError> {
        let diags = netlist.validate();
        if !diags.is_empty() {
            return Err(NetlistError::Invalid(diags));
        }
        let topo = topo_order(&netlist)?;
        let mut driver = vec![None; netlist.net_count()];
        for (g, gate) in netlist.gates.iter().enumerate() {
            driver[gate.output.index()] = Some(g);
        }
        let mut input_pos = vec![None; netlist.net_count()];
        for (pos, id) in netlist.inputs.iter().enumerate() {
            input_pos[id.index()] = Some(pos);
        }
        Ok(Circuit {
            netlist,
            topo,
            driver,
            input_pos,
        })
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn name(&self) -> &str {
        &self.netlist.name
    }

    pub fn net_count(&self) -> usize {
        self.netlist.net_count()
    }

    pub fn net_name(&self, id: NetId) -> &str {
        self.netlist.net_name(id)
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.netlist.find_net(name)
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.netlist.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.netlist.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.netlist.gates
    }

    /// Gate indices, drivers before readers.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Gate driving `net`, or `None` for primary inputs.
    pub fn driver(&self, net: NetId) -> Option<usize> {
        self.driver[net.index()]
    }

    /// Position of `net` in the primary-input list.
    pub fn input_position(&self, net: NetId) -> Option<usize> {
        self.input_pos[net.index()]
    }

    /// Logic level of every net: 0 for inputs and constants, else one more
    /// than the deepest gate input.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.net_count()];
        for &g in &self.topo {
            let gate = &self.netlist.gates[g];
            let l = gate
                .inputs
                .iter()
                .map(|i| level[i.index()] + 1)
                .max()
                .unwrap_or(0);
            level[gate.output.index()] = l;
        }
        level
    }

    pub fn depth(&self) -> usize {
        let levels = self.levels();
        self.outputs()
            .iter()
            .map(|o| levels[o.index()])
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The five-gate example module `c15`.
    pub(crate) fn c15() -> Circuit {
        let mut n = Netlist::new("c15");
        for i in ["G1", "G2", "G3", "G6", "G7"] {
            n.add_input(i);
        }
        let g19 = n.add_output("G19");
        let g22 = n.add_output("G22");
        let [g1, g2, g3, g6, g7] = ["G1", "G2", "G3", "G6", "G7"].map(|s| n.net(s));
        let g10 = n.net("G10");
        let g11 = n.net("G11");
        let g16 = n.net("G16");
        n.add_gate(GateKind::Nand, "NAND2_0", g10, vec![g1, g3]);
        n.add_gate(GateKind::Xor, "XOR2_0", g11, vec![g3, g6]);
        n.add_gate(GateKind::Nand, "NAND2_1", g16, vec![g2, g11]);
        n.add_gate(GateKind::And, "AND2_0", g19, vec![g11, g7]);
        n.add_gate(GateKind::Nor, "NOR2_0", g22, vec![g10, g16]);
        n.into_circuit().unwrap()
    }

    #[test]
    fn c15_is_valid_and_ordered() {
        let c = c15();
        assert_eq!(c.inputs().len(), 5);
        assert_eq!(c.outputs().len(), 2);
        assert_eq!(c.topo_order(), &[0, 1, 2, 3, 4]);
        assert_eq!(c.depth(), 3);
    }

    #[test]
    fn gate_kind_arity() {
        assert!(GateKind::Not.accepts_fan_in(1));
        assert!(!GateKind::Not.accepts_fan_in(2));
        assert!(GateKind::And.accepts_fan_in(9));
        assert!(!GateKind::Xor.accepts_fan_in(1));
        assert!(GateKind::Const1.accepts_fan_in(0));
    }

    #[test]
    fn xnor_is_complement_of_parity() {
        assert!(GateKind::Xnor.eval(&[true, true, false, false]));
        assert!(!GateKind::Xnor.eval(&[true, true, true]));
        assert!(GateKind::Xor.eval(&[true, true, true]));
    }
}
