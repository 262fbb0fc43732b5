use std::collections::HashMap;

use relaxsat::netlist::eval_discrete;
use relaxsat::{DedupScope, SolutionSet};

use crate::{load_constraints, read_file, report, write_file, CliError, CliResult, SampleArgs, VerifyArgs};

/// CSV text: a header of input names, then one 0/1 row per solution.
pub fn solutions_csv(set: &SolutionSet, all_inputs: bool) -> String {
    let (header, cols): (Vec<&str>, Vec<usize>) = if all_inputs {
        (
            set.input_names().iter().map(String::as_str).collect(),
            (0..set.input_names().len()).collect(),
        )
    } else {
        (set.cone_names(), set.cone_positions().to_vec())
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).unwrap();
    for row in set.iter() {
        w.write_record(cols.iter().map(|&j| if row[j] { "1" } else { "0" })).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn cmd_sample(args: &SampleArgs) -> CliResult {
    let circuit = args.circuit.load()?;
    let pins = load_constraints(&args.constraints, &circuit)?;
    let config = args.config();
    let name = args.circuit.circuit.display().to_string();
    let (set, report) = report::sample(&name, &circuit, &pins, &config).map_err(|e| CliError::Input(e.to_string()))?;
    // with full-vector dedup, a cone-only file could repeat rows
    let all = args.emit_all_inputs || config.dedup_scope == DedupScope::AllInputs;
    let text = solutions_csv(&set, all);
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.stats {
        write_file(path, &serde_json::to_string_pretty(&report).unwrap())?;
    }
    eprintln!(
        "{} unique solutions in {:.1} ms ({:.0}/s)",
        report.total_unique, report.wall_ms, report.throughput_per_s
    );
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let circuit = args.circuit.load()?;
    let pins = load_constraints(&args.constraints, &circuit)?;
    let text = read_file(&args.solutions)?;
    let file = args.solutions.display();
    if text.trim().is_empty() {
        eprintln!("warning: {file} is empty; nothing to verify");
        return Ok(());
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{file}: {e}")))?
        .clone();
    let mut cols = Vec::with_capacity(header.len());
    let mut seen = HashMap::new();
    for name in header.iter() {
        let pos = circuit
            .find_net(name)
            .and_then(|n| circuit.input_position(n))
            .ok_or_else(|| CliError::Input(format!("{file}: `{name}` is not a primary input")))?;
        if seen.insert(pos, ()).is_some() {
            return Err(CliError::Input(format!("{file}: `{name}` appears twice in the header")));
        }
        cols.push(pos);
    }
    for net in relaxsat::netlist::support_cone(&circuit, &pins) {
        let pos = circuit.input_position(net).unwrap();
        if !seen.contains_key(&pos) {
            return Err(CliError::Input(format!(
                "{file}: header lacks `{}`, which the pins depend on",
                circuit.net_name(net)
            )));
        }
    }
    let mut rows = 0usize;
    for (k, record) in rdr.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| CliError::Input(format!("{file}: {e}")))?;
        if record.len() != cols.len() {
            return Err(CliError::Input(format!(
                "{file}: line {line} has {} fields, header has {}",
                record.len(),
                cols.len()
            )));
        }
        // inputs absent from the header are outside the cone; any value works
        let mut assignment = vec![false; circuit.inputs().len()];
        for (field, &pos) in record.iter().zip(&cols) {
            assignment[pos] = match field.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(CliError::Input(format!("{file}: line {line}: `{other}` is not 0 or 1")));
                }
            };
        }
        let values = eval_discrete(&circuit, &assignment).map_err(|e| CliError::Input(e.to_string()))?;
        if let Some((net, want)) = pins.iter().find(|&(n, v)| values[n.index()] != v) {
            return Err(CliError::Verify(format!(
                "line {line} ({}) violates {} = {}",
                record.iter().collect::<Vec<_>>().join(","),
                circuit.net_name(net),
                u8::from(want)
            )));
        }
        rows += 1;
    }
    if rows == 0 {
        eprintln!("warning: {file} has no solution rows");
    } else {
        eprintln!("{rows} solutions verified");
    }
    Ok(())
}
