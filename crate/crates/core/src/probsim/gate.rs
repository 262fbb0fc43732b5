//! Per-gate probability model and its input derivatives.
//!
//! AND/OR/NAND/NOR use the product forms, XOR folds the binary formula
//! `(1-a)b + a(1-b)` from the left and XNOR is its complement. The fold is
//! the parity polynomial, so `1 - 2 P_y = prod(1 - 2 P_i)` and the
//! derivative of an n-ary XOR with respect to input `i` is
//! `prod_{j != i} (1 - 2 P_j)`.

use thiserror::Error;

use crate::netlist::GateKind;
use crate::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GateError {
    #[error("{kind} cannot take {fan_in} inputs")]
    Arity { kind: GateKind, fan_in: usize },
    #[error("input index {index} out of range for fan-in {fan_in}")]
    IndexOutOfRange { index: usize, fan_in: usize },
}

fn check(kind: GateKind, fan_in: usize) -> Result<(), GateError> {
    if kind.accepts_fan_in(fan_in) {
        Ok(())
    } else {
        Err(GateError::Arity { kind, fan_in })
    }
}

#[inline]
fn xor2(a: Real, b: Real) -> Real {
    (1.0 - a) * b + a * (1.0 - b)
}

/// Output probability of a gate.
pub fn gate_prob(kind: GateKind, p: &[Real]) -> Result<Real, GateError> {
    check(kind, p.len())?;
    Ok(match kind {
        GateKind::Not => 1.0 - p[0],
        GateKind::Buf => p[0],
        GateKind::And => p.iter().product(),
        GateKind::Or => 1.0 - p.iter().map(|x| 1.0 - x).product::<Real>(),
        GateKind::Nand => 1.0 - p.iter().product::<Real>(),
        GateKind::Nor => p.iter().map(|x| 1.0 - x).product(),
        GateKind::Xor => p[1..].iter().fold(p[0], |acc, &x| xor2(acc, x)),
        GateKind::Xnor => 1.0 - p[1..].iter().fold(p[0], |acc, &x| xor2(acc, x)),
        GateKind::Const0 => 0.0,
        GateKind::Const1 => 1.0,
    })
}

type Factor = fn(Real) -> Real;

/// Sign and per-input factor such that `dP_y/dP_i = sign * prod_{j != i} factor(P_j)`
/// for the product-form kinds.
#[inline]
fn product_form(kind: GateKind) -> Option<(Real, Factor)> {
    fn ident(x: Real) -> Real {
        x
    }
    fn compl(x: Real) -> Real {
        1.0 - x
    }
    fn parity(x: Real) -> Real {
        1.0 - 2.0 * x
    }
    match kind {
        GateKind::And => Some((1.0, ident)),
        GateKind::Nand => Some((-1.0, ident)),
        GateKind::Or => Some((1.0, compl)),
        GateKind::Nor => Some((-1.0, compl)),
        GateKind::Xor => Some((1.0, parity)),
        GateKind::Xnor => Some((-1.0, parity)),
        _ => None,
    }
}

/// `dP_y / dP_index`.
pub fn gate_grad(kind: GateKind, p: &[Real], index: usize) -> Result<Real, GateError> {
    check(kind, p.len())?;
    if index >= p.len() {
        return Err(GateError::IndexOutOfRange {
            index,
            fan_in: p.len(),
        });
    }
    Ok(match kind {
        GateKind::Not => -1.0,
        GateKind::Buf => 1.0,
        GateKind::Const0 | GateKind::Const1 => unreachable!("constants have no inputs"),
        _ => {
            let (sign, factor) = product_form(kind).unwrap();
            sign * p
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != index)
                .map(|(_, &x)| factor(x))
                .product::<Real>()
        }
    })
}

/// Batched forward kernel: `out[s] = gate_prob(kind, [ins[0][s], ins[1][s], ...])`.
pub(crate) fn forward_lanes(kind: GateKind, ins: &[&[Real]], out: &mut [Real]) {
    match kind {
        GateKind::Const0 => out.fill(0.0),
        GateKind::Const1 => out.fill(1.0),
        GateKind::Buf => out.copy_from_slice(ins[0]),
        GateKind::Not => {
            for (o, &a) in out.iter_mut().zip(ins[0]) {
                *o = 1.0 - a;
            }
        }
        GateKind::And | GateKind::Nand => {
            out.copy_from_slice(ins[0]);
            for lane in &ins[1..] {
                for (o, &a) in out.iter_mut().zip(*lane) {
                    *o *= a;
                }
            }
            if kind == GateKind::Nand {
                out.iter_mut().for_each(|o| *o = 1.0 - *o);
            }
        }
        GateKind::Or | GateKind::Nor => {
            for (o, &a) in out.iter_mut().zip(ins[0]) {
                *o = 1.0 - a;
            }
            for lane in &ins[1..] {
                for (o, &a) in out.iter_mut().zip(*lane) {
                    *o *= 1.0 - a;
                }
            }
            if kind == GateKind::Or {
                out.iter_mut().for_each(|o| *o = 1.0 - *o);
            }
        }
        GateKind::Xor | GateKind::Xnor => {
            out.copy_from_slice(ins[0]);
            for lane in &ins[1..] {
                for (o, &a) in out.iter_mut().zip(*lane) {
                    *o = xor2(*o, a);
                }
            }
            if kind == GateKind::Xnor {
                out.iter_mut().for_each(|o| *o = 1.0 - *o);
            }
        }
    }
}

/// Scratch lanes for [`backward_lanes`], reused across gates.
#[derive(Default)]
pub(crate) struct GradScratch {
    prefix: Vec<Vec<Real>>,
    suffix: Vec<Real>,
}

/// Batched reverse kernel. Calls `emit(i, d)` once per input position with
/// `d[s] = out_adj[s] * dP_y/dP_i` at sample `s`.
pub(crate) fn backward_lanes(
    kind: GateKind,
    ins: &[&[Real]],
    out_adj: &[Real],
    scratch: &mut GradScratch,
    mut emit: impl FnMut(usize, &[Real]),
) {
    let batch = out_adj.len();
    match kind {
        GateKind::Const0 | GateKind::Const1 => {}
        GateKind::Buf => emit(0, out_adj),
        GateKind::Not => {
            let d = &mut scratch.suffix;
            d.clear();
            d.extend(out_adj.iter().map(|&g| -g));
            emit(0, d);
        }
        _ => {
            let (sign, factor) = product_form(kind).unwrap();
            let f = ins.len();
            if scratch.prefix.len() < f {
                scratch.prefix.resize_with(f, Vec::new);
            }
            // prefix[i][s] = sign * out_adj[s] * prod_{j<i} factor(ins[j][s])
            {
                let p0 = &mut scratch.prefix[0];
                p0.clear();
                p0.extend(out_adj.iter().map(|&g| sign * g));
            }
            for i in 1..f {
                let (done, rest) = scratch.prefix.split_at_mut(i);
                let prev = &done[i - 1];
                let cur = &mut rest[0];
                cur.clear();
                cur.extend(prev.iter().zip(ins[i - 1]).map(|(&a, &x)| a * factor(x)));
            }
            let suffix = &mut scratch.suffix;
            suffix.clear();
            suffix.resize(batch, 1.0);
            for i in (0..f).rev() {
                let d = &mut scratch.prefix[i];
                for (dv, &sv) in d.iter_mut().zip(suffix.iter()) {
                    *dv *= sv;
                }
                emit(i, d);
                if i > 0 {
                    for (sv, &x) in suffix.iter_mut().zip(ins[i]) {
                        *sv *= factor(x);
                    }
                }
            }
        }
    }
}
