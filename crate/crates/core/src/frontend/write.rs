use std::fmt::Write;

use super::FrontendError;
use crate::netlist::{Circuit, GateKind, NetId};

fn names<'a>(c: &'a Circuit, ids: &'a [NetId]) -> impl Iterator<Item = &'a str> + 'a {
    ids.iter().map(move |&i| c.net_name(i))
}

fn verilog_name(s: &str) -> String {
    let plain = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$');
    if plain {
        s.to_owned()
    } else {
        format!("\\{s} ")
    }
}

/// Structural Verilog in the subset accepted by `parse_verilog`.
pub fn write_verilog(c: &Circuit) -> String {
    let mut out = String::new();
    let module = if c.name().is_empty() { "top" } else { c.name() };
    let mut ports: Vec<String> = names(c, c.inputs()).map(verilog_name).collect();
    for o in c.outputs() {
        if c.input_position(*o).is_none() {
            ports.push(verilog_name(c.net_name(*o)));
        }
    }
    let _ = writeln!(out, "module {}({});", verilog_name(module), ports.join(", "));
    if !c.inputs().is_empty() {
        let list: Vec<_> = names(c, c.inputs()).map(verilog_name).collect();
        let _ = writeln!(out, "  input {};", list.join(", "));
    }
    let outs: Vec<_> = c
        .outputs()
        .iter()
        .filter(|o| c.input_position(**o).is_none())
        .map(|&o| verilog_name(c.net_name(o)))
        .collect();
    if !outs.is_empty() {
        let _ = writeln!(out, "  output {};", outs.join(", "));
    }
    let mut is_port = vec![false; c.net_count()];
    for &n in c.inputs().iter().chain(c.outputs()) {
        is_port[n.index()] = true;
    }
    let wires: Vec<_> = (0..c.net_count())
        .filter(|&n| !is_port[n])
        .map(|n| verilog_name(c.net_name(NetId::new(n))))
        .collect();
    if !wires.is_empty() {
        let _ = writeln!(out, "  wire {};", wires.join(", "));
    }
    for g in c.gates() {
        let y = verilog_name(c.net_name(g.output));
        let inst = verilog_name(&g.name);
        match g.kind {
            GateKind::Const0 => {
                let _ = writeln!(out, "  buf {inst}({y}, 1'b0);");
            }
            GateKind::Const1 => {
                let _ = writeln!(out, "  buf {inst}({y}, 1'b1);");
            }
            kind => {
                let ins: Vec<_> = g.inputs.iter().map(|&i| verilog_name(c.net_name(i))).collect();
                let _ = writeln!(out, "  {} {inst}({y}, {});", kind.keyword(), ins.join(", "));
            }
        }
    }
    out.push_str("endmodule\n");
    out
}

/// ISCAS `.bench`. Constant drivers have no `.bench` spelling.
pub fn write_bench(c: &Circuit) -> Result<String, FrontendError> {
    let mut out = String::new();
    for n in names(c, c.inputs()) {
        let _ = writeln!(out, "INPUT({n})");
    }
    for n in names(c, c.outputs()) {
        let _ = writeln!(out, "OUTPUT({n})");
    }
    for g in c.gates() {
        let kw = match g.kind {
            GateKind::Buf => "BUFF",
            GateKind::Const0 | GateKind::Const1 => {
                return Err(FrontendError::Unrepresentable {
                    format: ".bench",
                    what: format!("constant driver on `{}`", c.net_name(g.output)),
                })
            }
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
        };
        let ins: Vec<_> = names(c, &g.inputs).collect();
        let _ = writeln!(out, "{} = {kw}({})", c.net_name(g.output), ins.join(", "));
    }
    Ok(out)
}

/// BLIF with one minimal cover per gate.
pub fn write_blif(c: &Circuit) -> String {
    let mut out = String::new();
    let model = if c.name().is_empty() { "top" } else { c.name() };
    let _ = writeln!(out, ".model {model}");
    let _ = writeln!(out, ".inputs {}", names(c, c.inputs()).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, ".outputs {}", names(c, c.outputs()).collect::<Vec<_>>().join(" "));
    for g in c.gates() {
        let mut sig: Vec<_> = names(c, &g.inputs).collect();
        sig.push(c.net_name(g.output));
        let _ = writeln!(out, ".names {}", sig.join(" "));
        let k = g.inputs.len();
        let one_hot = |j: usize, on: char, off: char| -> String {
            (0..k).map(|i| if i == j { on } else { off }).collect()
        };
        match g.kind {
            GateKind::Const0 => {}
            GateKind::Const1 => out.push_str("1\n"),
            GateKind::Buf => out.push_str("1 1\n"),
            GateKind::Not => out.push_str("0 1\n"),
            GateKind::And => {
                let _ = writeln!(out, "{} 1", "1".repeat(k));
            }
            GateKind::Nand => {
                let _ = writeln!(out, "{} 0", "1".repeat(k));
            }
            GateKind::Nor => {
                let _ = writeln!(out, "{} 1", "0".repeat(k));
            }
            GateKind::Or => {
                for j in 0..k {
                    let _ = writeln!(out, "{} 1", one_hot(j, '1', '-'));
                }
            }
            GateKind::Xor | GateKind::Xnor => {
                let want_odd = g.kind == GateKind::Xor;
                for m in 0..1usize << k {
                    if (m.count_ones() % 2 == 1) == want_odd {
                        let row: String = (0..k).map(|j| if m >> j & 1 == 1 { '1' } else { '0' }).collect();
                        let _ = writeln!(out, "{row} 1");
                    }
                }
            }
        }
    }
    out.push_str(".end\n");
    out
}
