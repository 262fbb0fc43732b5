use std::collections::HashSet;

use super::FrontendError;
use crate::netlist::{Circuit, GateKind, Netlist};

fn keyword(word: &str) -> Option<GateKind> {
    Some(match word.to_ascii_uppercase().as_str() {
        "NOT" | "INV" => GateKind::Not,
        "BUFF" | "BUF" => GateKind::Buf,
        "AND" => GateKind::And,
        "OR" => GateKind::Or,
        "NAND" => GateKind::Nand,
        "NOR" => GateKind::Nor,
        "XOR" => GateKind::Xor,
        "XNOR" => GateKind::Xnor,
        _ => return None,
    })
}

fn syntax(line: usize, message: impl Into<String>) -> FrontendError {
    FrontendError::Syntax {
        line,
        col: 1,
        message: message.into(),
    }
}

/// Splits `NAME(arg, arg, ...)` into the name and its arguments.
fn call(s: &str, line: usize) -> Result<(&str, Vec<&str>), FrontendError> {
    let open = s.find('(').ok_or_else(|| syntax(line, format!("expected `(` in `{s}`")))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| syntax(line, format!("expected `)` at end of `{s}`")))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    if args.iter().any(|a| a.is_empty()) {
        return Err(syntax(line, format!("empty argument in `{s}`")));
    }
    Ok((s[..open].trim(), args))
}

/// Parses the ISCAS `.bench` format: `INPUT(x)`, `OUTPUT(x)` and
/// `x = KIND(a, b, ...)` lines.
pub fn parse_bench(text: &str) -> Result<Circuit, FrontendError> {
    let mut netlist = Netlist::new("");
    let mut defined: HashSet<String> = HashSet::new();
    let mut pending_outputs = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = body.split_once('=') {
            let out = lhs.trim();
            let (kw, args) = call(rhs.trim(), line)?;
            let kind = keyword(kw).ok_or_else(|| FrontendError::UnknownGate {
                line,
                keyword: kw.to_owned(),
            })?;
            if out.is_empty() {
                return Err(syntax(line, "missing net name before `=`"));
            }
            if !defined.insert(out.to_owned()) {
                return Err(FrontendError::Redefinition {
                    line,
                    net: out.to_owned(),
                });
            }
            if !kind.accepts_fan_in(args.len()) {
                return Err(FrontendError::Arity {
                    line,
                    gate: out.to_owned(),
                    kind: kind.to_string(),
                    fan_in: args.len(),
                });
            }
            let ins = args.iter().map(|a| netlist.net(a)).collect();
            let y = netlist.net(out);
            netlist.add_gate(kind, out, y, ins);
        } else {
            let (kw, args) = call(body, line)?;
            let [net] = args.as_slice() else {
                return Err(syntax(line, format!("`{kw}` takes exactly one net")));
            };
            match kw.to_ascii_uppercase().as_str() {
                "INPUT" => {
                    if !defined.insert((*net).to_owned()) {
                        return Err(FrontendError::Redefinition {
                            line,
                            net: (*net).to_owned(),
                        });
                    }
                    netlist.add_input(net);
                }
                "OUTPUT" => pending_outputs.push((*net).to_owned()),
                _ => {
                    return Err(FrontendError::UnknownGate {
                        line,
                        keyword: kw.to_owned(),
                    })
                }
            }
        }
    }
    for o in &pending_outputs {
        netlist.add_output(o);
    }
    Ok(netlist.into_circuit()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C17: &str = include_str!("../../tests/fixtures/c17.bench");

    #[test]
    fn parses_c17() {
        let c = parse_bench(C17).unwrap();
        assert_eq!((c.inputs().len(), c.outputs().len(), c.gates().len()), (5, 2, 6));
        assert!(c.gates().iter().all(|g| g.kind == GateKind::Nand));
    }

    #[test]
    fn single_not() {
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n").unwrap();
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.gates()[0].kind, GateKind::Not);
    }

    #[test]
    fn unknown_keyword() {
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = DFF(a)\n").unwrap_err();
        assert!(matches!(err, FrontendError::UnknownGate { line: 3, ref keyword } if keyword == "DFF"));
    }

    #[test]
    fn redefinition() {
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUFF(a)\n").unwrap_err();
        assert!(matches!(err, FrontendError::Redefinition { line: 4, .. }));
        let err = parse_bench("INPUT(a)\nINPUT(a)\n").unwrap_err();
        assert!(matches!(err, FrontendError::Redefinition { line: 2, .. }));
    }

    #[test]
    fn buff_and_wide_gates() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nt = BUFF(a)\ny = AND(t, b, c)\n").unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::Buf);
        assert_eq!(c.gates()[1].inputs.len(), 3);
    }

    #[test]
    fn output_can_precede_its_driver_and_be_an_input() {
        let c = parse_bench("OUTPUT(a)\nOUTPUT(y)\nINPUT(a)\ny = NOT(a)\n").unwrap();
        assert_eq!(c.outputs().len(), 2);
    }
}
