use std::collections::HashSet;

use super::FrontendError;
use crate::netlist::{Circuit, GateKind, Netlist};

const MAX_COVER_INPUTS: usize = 16;

struct Names {
    line: usize,
    signals: Vec<String>,
    rows: Vec<(String, char, usize)>,
}

/// Logical lines with comments stripped and `\` continuations joined; each
/// carries the number of the line it started on.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let (body, cont) = match body.trim_end().strip_suffix('\\') {
            Some(b) => (b, true),
            None => (body, false),
        };
        let entry = pending.get_or_insert_with(|| (i + 1, String::new()));
        entry.1.push(' ');
        entry.1.push_str(body);
        if !cont {
            let (l, s) = pending.take().unwrap();
            if !s.trim().is_empty() {
                out.push((l, s.trim().to_owned()));
            }
        }
    }
    if let Some((l, s)) = pending {
        if !s.trim().is_empty() {
            out.push((l, s.trim().to_owned()));
        }
    }
    out
}

/// Parses one `.model`. Each `.names` cover is matched by truth table
/// against the supported gate kinds.
pub fn parse_blif(text: &str) -> Result<Circuit, FrontendError> {
    let mut model = None;
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut covers: Vec<Names> = Vec::new();
    let mut in_names = false;

    for (line, l) in logical_lines(text) {
        let mut words = l.split_whitespace();
        let head = words.next().unwrap();
        if !head.starts_with('.') {
            if !in_names {
                return Err(FrontendError::Syntax {
                    line,
                    col: 1,
                    message: format!("cover row `{l}` outside of .names"),
                });
            }
            let cur = covers.last_mut().unwrap();
            let parts: Vec<&str> = l.split_whitespace().collect();
            let (pattern, out) = match (cur.signals.len(), parts.as_slice()) {
                (1, [o]) => ("", *o),
                (_, [p, o]) => (*p, *o),
                _ => {
                    return Err(FrontendError::Syntax {
                        line,
                        col: 1,
                        message: format!("malformed cover row `{l}`"),
                    })
                }
            };
            let k = cur.signals.len() - 1;
            if pattern.len() != k || !pattern.chars().all(|c| "01-".contains(c)) {
                return Err(FrontendError::Syntax {
                    line,
                    col: 1,
                    message: format!("cover row `{l}` does not match {k} inputs"),
                });
            }
            let out = match out {
                "1" => '1',
                "0" => '0',
                _ => {
                    return Err(FrontendError::Syntax {
                        line,
                        col: 1,
                        message: format!("cover output must be 0 or 1 in `{l}`"),
                    })
                }
            };
            cur.rows.push((pattern.to_owned(), out, line));
            continue;
        }
        in_names = false;
        let rest: Vec<String> = words.map(str::to_owned).collect();
        match head {
            ".model" => {
                if model.is_some() {
                    return Err(FrontendError::Unsupported {
                        line,
                        col: 1,
                        construct: "multiple .model sections".into(),
                    });
                }
                model = Some(rest.first().cloned().unwrap_or_default());
            }
            ".inputs" => inputs.get_or_insert_with(Vec::new).extend(rest),
            ".outputs" => outputs.get_or_insert_with(Vec::new).extend(rest),
            ".names" => {
                if rest.is_empty() {
                    return Err(FrontendError::Syntax {
                        line,
                        col: 1,
                        message: ".names needs at least an output".into(),
                    });
                }
                covers.push(Names {
                    line,
                    signals: rest,
                    rows: Vec::new(),
                });
                in_names = true;
            }
            ".end" => break,
            ".latch" | ".mlatch" => {
                return Err(FrontendError::Unsupported {
                    line,
                    col: 1,
                    construct: format!("{head} (sequential elements are not supported)"),
                })
            }
            other => {
                return Err(FrontendError::Unsupported {
                    line,
                    col: 1,
                    construct: format!("directive {other}"),
                })
            }
        }
    }

    let inputs = inputs.ok_or(FrontendError::Missing(".inputs"))?;
    let outputs = outputs.ok_or(FrontendError::Missing(".outputs"))?;
    let mut netlist = Netlist::new(model.unwrap_or_default());
    for i in &inputs {
        netlist.add_input(i);
    }
    for o in &outputs {
        netlist.add_output(o);
    }
    let mut driven: HashSet<String> = inputs.iter().cloned().collect();
    for cover in &covers {
        let out_name = cover.signals.last().unwrap();
        if !driven.insert(out_name.clone()) {
            return Err(FrontendError::DuplicateDriver {
                line: cover.line,
                net: out_name.clone(),
            });
        }
        let kind = classify(cover)?;
        let ins = cover.signals[..cover.signals.len() - 1]
            .iter()
            .map(|s| netlist.net(s))
            .collect();
        let out = netlist.net(out_name);
        netlist.add_gate(kind, format!("names_{out_name}"), out, ins);
    }
    Ok(netlist.into_circuit()?)
}

fn classify(cover: &Names) -> Result<GateKind, FrontendError> {
    let k = cover.signals.len() - 1;
    let net = cover.signals.last().unwrap().clone();
    let unsupported = |reason: String| FrontendError::UnsupportedCover {
        line: cover.line,
        net: net.clone(),
        reason,
    };
    if k > MAX_COVER_INPUTS {
        return Err(unsupported(format!("{k} inputs exceeds the limit of {MAX_COVER_INPUTS}")));
    }
    let polarity = cover.rows.first().map_or('1', |r| r.1);
    if cover.rows.iter().any(|r| r.1 != polarity) {
        return Err(unsupported("mixes on-set and off-set rows".into()));
    }
    // on-set of the cover rows, then complemented for an off-set cover
    let mut table = vec![false; 1 << k];
    for (pattern, _, _) in &cover.rows {
        for (m, slot) in table.iter_mut().enumerate() {
            let hit = pattern.chars().enumerate().all(|(j, c)| match c {
                '1' => m >> j & 1 == 1,
                '0' => m >> j & 1 == 0,
                _ => true,
            });
            *slot |= hit;
        }
    }
    if polarity == '0' {
        table.iter_mut().for_each(|b| *b = !*b);
    }
    // `.names y` with no rows is constant 0
    if cover.rows.is_empty() {
        table = vec![false; 1 << k];
    }

    let candidates: &[GateKind] = match k {
        0 => &[GateKind::Const0, GateKind::Const1],
        1 => &[GateKind::Buf, GateKind::Not],
        _ => &[
            GateKind::And,
            GateKind::Or,
            GateKind::Nand,
            GateKind::Nor,
            GateKind::Xor,
            GateKind::Xnor,
        ],
    };
    let mut bits = vec![false; k];
    candidates
        .iter()
        .copied()
        .find(|kind| {
            table.iter().enumerate().all(|(m, &want)| {
                for (j, b) in bits.iter_mut().enumerate() {
                    *b = m >> j & 1 == 1;
                }
                kind.eval(&bits) == want
            })
        })
        .ok_or_else(|| unsupported(format!("truth table over {k} inputs")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_verilog;
    use crate::netlist::eval_discrete;

    fn single(cover: &str) -> Result<GateKind, FrontendError> {
        let src = format!(".model t\n.inputs a b c\n.outputs y\n{cover}\n.end\n");
        parse_blif(&src).map(|c| c.gates()[0].kind)
    }

    #[test]
    fn and_cover() {
        assert_eq!(single(".names a b y\n11 1").unwrap(), GateKind::And);
    }

    #[test]
    fn equivalent_encodings_classify_the_same() {
        assert_eq!(single(".names a b y\n1- 1\n-1 1").unwrap(), GateKind::Or);
        assert_eq!(single(".names a b y\n00 0").unwrap(), GateKind::Or);
        assert_eq!(single(".names a b y\n11 0").unwrap(), GateKind::Nand);
        assert_eq!(single(".names a b y\n0- 1\n-0 1").unwrap(), GateKind::Nand);
        assert_eq!(single(".names a b y\n00 1").unwrap(), GateKind::Nor);
        assert_eq!(single(".names a b y\n01 1\n10 1").unwrap(), GateKind::Xor);
        assert_eq!(single(".names a b y\n00 1\n11 1").unwrap(), GateKind::Xnor);
        assert_eq!(single(".names a y\n0 1").unwrap(), GateKind::Not);
        assert_eq!(single(".names a y\n1 1").unwrap(), GateKind::Buf);
        assert_eq!(single(".names a b c y\n111 1").unwrap(), GateKind::And);
        assert_eq!(
            single(".names a b c y\n100 1\n010 1\n001 1\n111 1").unwrap(),
            GateKind::Xor
        );
    }

    #[test]
    fn constant_covers() {
        assert_eq!(single(".names y\n1").unwrap(), GateKind::Const1);
        assert_eq!(single(".names y").unwrap(), GateKind::Const0);
    }

    #[test]
    fn unsupported_cover() {
        // a AND NOT b
        assert!(matches!(
            single(".names a b y\n10 1"),
            Err(FrontendError::UnsupportedCover { .. })
        ));
        // majority
        assert!(matches!(
            single(".names a b c y\n11- 1\n1-1 1\n-11 1"),
            Err(FrontendError::UnsupportedCover { .. })
        ));
    }

    #[test]
    fn missing_sections_and_latches() {
        assert!(matches!(
            parse_blif(".model t\n.outputs y\n.names y\n1\n.end"),
            Err(FrontendError::Missing(".inputs"))
        ));
        assert!(matches!(
            parse_blif(".model t\n.inputs a\n.names a y\n1 1\n.end"),
            Err(FrontendError::Missing(".outputs"))
        ));
        assert!(matches!(
            parse_blif(".model t\n.inputs a\n.outputs y\n.latch a y 0\n.end"),
            Err(FrontendError::Unsupported { .. })
        ));
    }

    #[test]
    fn duplicate_driver() {
        let src = ".model t\n.inputs a\n.outputs y\n.names a y\n1 1\n.names a y\n0 1\n.end";
        assert!(matches!(
            parse_blif(src),
            Err(FrontendError::DuplicateDriver { line: 6, .. })
        ));
    }

    #[test]
    fn continuation_lines() {
        let src = ".model t\n.inputs a \\\n b\n.outputs y\n.names a b y\n11 1\n.end";
        let c = parse_blif(src).unwrap();
        assert_eq!(c.inputs().len(), 2);
    }

    #[test]
    fn c15_blif_matches_verilog() {
        let v = parse_verilog(include_str!("../../tests/fixtures/c15.v")).unwrap();
        let b = parse_blif(include_str!("../../tests/fixtures/c15.blif")).unwrap();
        let v_names: Vec<_> = v.inputs().iter().map(|&i| v.net_name(i)).collect();
        let b_names: Vec<_> = b.inputs().iter().map(|&i| b.net_name(i)).collect();
        assert_eq!(v_names, b_names);
        for m in 0..32u32 {
            let a: Vec<bool> = (0..5).map(|j| m >> j & 1 == 1).collect();
            let ev = eval_discrete(&v, &a).unwrap();
            let eb = eval_discrete(&b, &a).unwrap();
            for name in ["G10", "G11", "G16", "G19", "G22"] {
                assert_eq!(
                    ev[v.find_net(name).unwrap().index()],
                    eb[b.find_net(name).unwrap().index()],
                    "{name} at {m}"
                );
            }
        }
    }
}
