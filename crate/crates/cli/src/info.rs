use std::collections::BTreeMap;

use relaxsat::{tseytin_encode, write_dimacs, Circuit, ConstraintSet};
use serde::Serialize;

use crate::{load_constraints, write_file, CliResult, ExportArgs, InfoArgs};

#[derive(Debug, Serialize)]
pub struct CircuitInfo {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
    /// Logic gates; constant drivers are not counted.
    pub gates: usize,
    pub nets: usize,
    pub gate_kinds: BTreeMap<String, usize>,
    pub max_fan_in: usize,
    pub depth: usize,
}

pub fn circuit_info(c: &Circuit) -> CircuitInfo {
    let mut kinds = BTreeMap::new();
    for g in c.gates() {
        *kinds.entry(g.kind.to_string()).or_insert(0) += 1;
    }
    CircuitInfo {
        name: c.name().to_owned(),
        inputs: c.inputs().len(),
        outputs: c.outputs().len(),
        gates: c.gates().iter().filter(|g| !g.kind.is_const()).count(),
        nets: c.net_count(),
        gate_kinds: kinds,
        max_fan_in: c.gates().iter().map(|g| g.inputs.len()).max().unwrap_or(0),
        depth: c.depth(),
    }
}

pub fn cmd_info(args: &InfoArgs) -> CliResult {
    let info = circuit_info(&args.circuit.load()?);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&info).unwrap());
        return Ok(());
    }
    println!("circuit    {}", info.name);
    println!("inputs     {}", info.inputs);
    println!("outputs    {}", info.outputs);
    println!("gates      {}", info.gates);
    println!("nets       {}", info.nets);
    println!("max fan-in {}", info.max_fan_in);
    println!("depth      {}", info.depth);
    for (kind, n) in &info.gate_kinds {
        println!("  {kind:<6} {n}");
    }
    Ok(())
}

pub fn cmd_export_cnf(args: &ExportArgs) -> CliResult {
    let circuit = args.circuit.load()?;
    let pins = match &args.constraints {
        Some(path) => load_constraints(path, &circuit)?,
        None => ConstraintSet::new(),
    };
    let cnf = tseytin_encode(&circuit, &pins);
    let text = write_dimacs(&cnf);
    let counts = format!("variables {}\nclauses {}", cnf.var_count, cnf.clauses.len());
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            println!("{counts}");
        }
        None => {
            print!("{text}");
            eprintln!("{counts}");
        }
    }
    Ok(())
}
