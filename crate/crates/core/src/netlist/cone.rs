use super::{Circuit, ConstraintSet, NetId};

/// Marks every net in the transitive fan-in of `roots` (roots included).
pub(crate) fn fanin_nets(circuit: &Circuit, roots: impl IntoIterator<Item = NetId>) -> Vec<bool> {
    let mut mark = vec![false; circuit.net_count()];
    let mut stack: Vec<NetId> = roots.into_iter().collect();
    while let Some(net) = stack.pop() {
        if std::mem::replace(&mut mark[net.index()], true) {
            continue;
        }
        if let Some(g) = circuit.driver(net) {
            stack.extend(circuit.gates()[g].inputs.iter().copied());
        }
    }
    mark
}

/// Primary inputs in the transitive fan-in of any pinned net, in
/// primary-input declaration order.
pub fn support_cone(circuit: &Circuit, constraints: &ConstraintSet) -> Vec<NetId> {
    let mark = fanin_nets(circuit, constraints.iter().map(|(net, _)| net));
    circuit
        .inputs()
        .iter()
        .copied()
        .filter(|i| mark[i.index()])
        .collect()
}
