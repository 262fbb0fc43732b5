use thiserror::Error;

use super::{Circuit, NetId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("duplicate pin: net `{0}` is pinned more than once")]
    DuplicatePin(String),
    #[error("line {line}: unknown net `{net}`")]
    UnknownNet { line: usize, net: String },
    #[error("line {line}: expected `<net> <0|1>`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("pinned net index {0} is out of range for this circuit")]
    OutOfRange(usize),
}

/// Target bits pinned on output or intermediate nets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pins: Vec<(NetId, bool)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a pin. The error carries the net index; use [`ConstraintSet::parse`]
    /// for named errors.
    pub fn pin(&mut self, net: NetId, value: bool) -> Result<(), ConstraintError> {
        if self.get(net).is_some() {
            return Err(ConstraintError::DuplicatePin(format!("#{}", net.index())));
        }
        self.pins.push((net, value));
        Ok(())
    }

    pub fn get(&self, net: NetId) -> Option<bool> {
        self.pins.iter().find(|(n, _)| *n == net).map(|&(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NetId, bool)> + '_ {
        self.pins.iter().copied()
    }

    pub fn nets(&self) -> impl Iterator<Item = NetId> + '_ {
        self.pins.iter().map(|&(n, _)| n)
    }

    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    /// Parses the line format `<net_name> <0|1>` with `#` comments.
    pub fn parse(text: &str, circuit: &Circuit) -> Result<Self, ConstraintError> {
        let mut set = ConstraintSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut fields = body.split_whitespace();
            let (Some(name), Some(bit), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(ConstraintError::Syntax {
                    line,
                    text: body.to_owned(),
                });
            };
            let value = match bit {
                "0" => false,
                "1" => true,
                _ => {
                    return Err(ConstraintError::Syntax {
                        line,
                        text: body.to_owned(),
                    })
                }
            };
            let net = circuit
                .find_net(name)
                .ok_or_else(|| ConstraintError::UnknownNet {
                    line,
                    net: name.to_owned(),
                })?;
            if set.get(net).is_some() {
                return Err(ConstraintError::DuplicatePin(name.to_owned()));
            }
            set.pins.push((net, value));
        }
        Ok(set)
    }

    /// Renders back to the line format.
    pub fn to_text(&self, circuit: &Circuit) -> String {
        self.pins
            .iter()
            .map(|&(n, v)| format!("{} {}\n", circuit.net_name(n), u8::from(v)))
            .collect()
    }

    pub fn check_against(&self, circuit: &Circuit) -> Result<(), ConstraintError> {
        match self.pins.iter().find(|(n, _)| n.index() >= circuit.net_count()) {
            Some((n, _)) => Err(ConstraintError::OutOfRange(n.index())),
            None => Ok(()),
        }
    }

    /// Whether a full net valuation (as returned by `eval_discrete`) meets
    /// every pin.
    pub fn satisfied_by(&self, net_values: &[bool]) -> bool {
        self.pins.iter().all(|&(n, v)| net_values[n.index()] == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::tests::c15;

    #[test]
    fn parses_pins_and_comments() {
        let c = c15();
        let set = ConstraintSet::parse("# header\nG19 1\n  G22 0 # trailing\n\n", &c).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.get(c.find_net("G19").unwrap()), Some(true));
        assert_eq!(set.get(c.find_net("G22").unwrap()), Some(false));
        assert_eq!(set.to_text(&c), "G19 1\nG22 0\n");
    }

    #[test]
    fn duplicate_pin_is_an_error() {
        let c = c15();
        assert_eq!(
            ConstraintSet::parse("G19 0\nG19 1\n", &c),
            Err(ConstraintError::DuplicatePin("G19".into()))
        );
    }

    #[test]
    fn rejects_bad_lines() {
        let c = c15();
        assert!(matches!(
            ConstraintSet::parse("G19 2", &c),
            Err(ConstraintError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            ConstraintSet::parse("\nG19", &c),
            Err(ConstraintError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            ConstraintSet::parse("nope 1", &c),
            Err(ConstraintError::UnknownNet { line: 1, .. })
        ));
    }
}
