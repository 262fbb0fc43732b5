use super::{Circuit, GateKind, NetlistError};

/// Exact Boolean value of every net (indexed by `NetId::index`) under the
/// given primary-input assignment. This is the verification oracle.
pub fn eval_discrete(circuit: &Circuit, assignment: &[bool]) -> Result<Vec<bool>, NetlistError> {
    let inputs = circuit.inputs();
    if assignment.len() < inputs.len() {
        return Err(NetlistError::MissingInput(
            circuit.net_name(inputs[assignment.len()]).to_owned(),
        ));
    }
    if assignment.len() > inputs.len() {
        return Err(NetlistError::TooManyInputs {
            expected: inputs.len(),
            got: assignment.len(),
        });
    }
    let mut value = vec![false; circuit.net_count()];
    for (&net, &bit) in inputs.iter().zip(assignment) {
        value[net.index()] = bit;
    }
    let mut scratch = Vec::new();
    for &g in circuit.topo_order() {
        let gate = &circuit.gates()[g];
        scratch.clear();
        scratch.extend(gate.inputs.iter().map(|i| value[i.index()]));
        value[gate.output.index()] = gate.kind.eval(&scratch);
    }
    Ok(value)
}

/// Bit-parallel simulation of 64 assignments at once. `input_words[j]` holds
/// the values of primary input `j`, one assignment per bit. Returns one
/// word per net.
pub fn simulate_packed(circuit: &Circuit, input_words: &[u64]) -> Vec<u64> {
    assert_eq!(input_words.len(), circuit.inputs().len());
    let mut word = vec![0u64; circuit.net_count()];
    for (&net, &w) in circuit.inputs().iter().zip(input_words) {
        word[net.index()] = w;
    }
    for &g in circuit.topo_order() {
        let gate = &circuit.gates()[g];
        let mut ins = gate.inputs.iter().map(|i| word[i.index()]);
        let out = match gate.kind {
            GateKind::Not => !ins.next().unwrap(),
            GateKind::Buf => ins.next().unwrap(),
            GateKind::And => ins.fold(!0, |a, b| a & b),
            GateKind::Or => ins.fold(0, |a, b| a | b),
            GateKind::Nand => !ins.fold(!0, |a, b| a & b),
            GateKind::Nor => !ins.fold(0, |a, b| a | b),
            GateKind::Xor => ins.fold(0, |a, b| a ^ b),
            GateKind::Xnor => !ins.fold(0, |a, b| a ^ b),
            GateKind::Const0 => 0,
            GateKind::Const1 => !0,
        };
        word[gate.output.index()] = out;
    }
    word
}
