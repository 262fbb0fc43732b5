//! Netlist readers and writers: a positional-port, gate-primitive Verilog
//! subset, single-output BLIF covers, and ISCAS `.bench`.

mod bench;
mod blif;
mod verilog;
mod write;

use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::netlist::{Circuit, NetlistError};

pub use bench::parse_bench;
pub use blif::parse_blif;
pub use verilog::parse_verilog;
pub use write::{write_bench, write_blif, write_verilog};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceFormat {
    Verilog,
    Blif,
    Bench,
}

impl SourceFormat {
    /// Infers the format from `.v`, `.blif` or `.bench`.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "v" => Some(SourceFormat::Verilog),
            "blif" => Some(SourceFormat::Blif),
            "bench" => Some(SourceFormat::Bench),
            _ => None,
        }
    }
}

impl FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "verilog" | "v" => Ok(SourceFormat::Verilog),
            "blif" => Ok(SourceFormat::Blif),
            "bench" => Ok(SourceFormat::Bench),
            other => Err(format!("unknown netlist format `{other}` (expected verilog|blif|bench)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unsupported construct: {construct}")]
    Unsupported {
        line: usize,
        col: usize,
        construct: String,
    },
    #[error("{line}:{col}: undeclared net `{net}`")]
    UndeclaredNet { line: usize, col: usize, net: String },
    #[error("line {line}: gate `{gate}` ({kind}) cannot take {fan_in} inputs")]
    Arity {
        line: usize,
        gate: String,
        kind: String,
        fan_in: usize,
    },
    #[error("line {line}: cover for `{net}` matches no supported gate: {reason}")]
    UnsupportedCover {
        line: usize,
        net: String,
        reason: String,
    },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("line {line}: net `{net}` already has a driver")]
    DuplicateDriver { line: usize, net: String },
    #[error("line {line}: unknown gate keyword `{keyword}`")]
    UnknownGate { line: usize, keyword: String },
    #[error("line {line}: net `{net}` is defined more than once")]
    Redefinition { line: usize, net: String },
    #[error("{format} cannot represent {what}")]
    Unrepresentable { format: &'static str, what: String },
    #[error(transparent)]
    Invalid(#[from] NetlistError),
}

pub fn parse(text: &str, format: SourceFormat) -> Result<Circuit, FrontendError> {
    match format {
        SourceFormat::Verilog => parse_verilog(text),
        SourceFormat::Blif => parse_blif(text),
        SourceFormat::Bench => parse_bench(text),
    }
}
