//! Manifest-driven sampling sweeps.
//!
//! ```toml
//! [defaults]
//! batch = 10000
//! iters = 10
//!
//! [[cell]]
//! name = "c432-lr"
//! circuit = "c432.v"          # relative to the manifest
//! constraints = "c432.pins"   # or: pins = { N223 = 1, N329 = 0 }
//! lr = [1, 5, 10, 15, 20]     # any grid key takes a value or a list
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use relaxsat::{Circuit, ConstraintSet, DedupScope, SamplerConfig, SourceFormat};
use serde::{Deserialize, Serialize};

use crate::report::{self, throughput, RunReport};
use crate::{load_circuit, load_constraints, read_file, write_file, BenchArgs, CliError, CliResult};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// TOML integers are not floats; accept both for real-valued keys.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    fn get(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(f) => f,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    batch: Option<OneOrMany<usize>>,
    lr: Option<OneOrMany<Number>>,
    iters: Option<OneOrMany<usize>>,
    seed: Option<OneOrMany<u64>>,
    init_range: Option<OneOrMany<Number>>,
    dedup: Option<DedupName>,
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DedupName {
    Cone,
    All,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cell {
    name: String,
    circuit: PathBuf,
    format: Option<String>,
    constraints: Option<PathBuf>,
    pins: Option<BTreeMap<String, u8>>,
    #[serde(flatten)]
    grid: Grid,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    defaults: Grid,
    #[serde(rename = "cell", default)]
    cells: Vec<Cell>,
}

impl Grid {
    /// Settings of `self` with unset keys taken from `base`.
    fn over(&self, base: &Grid) -> Grid {
        Grid {
            batch: self.batch.clone().or(base.batch.clone()),
            lr: self.lr.clone().or(base.lr.clone()),
            iters: self.iters.clone().or(base.iters.clone()),
            seed: self.seed.clone().or(base.seed.clone()),
            init_range: self.init_range.clone().or(base.init_range.clone()),
            dedup: self.dedup.or(base.dedup),
            threads: self.threads.or(base.threads),
        }
    }

    /// Cartesian product in key order batch, lr, iters, seed, init_range.
    fn configs(&self) -> Vec<SamplerConfig> {
        let d = SamplerConfig::default();
        let batch = self.batch.as_ref().map_or(vec![d.batch_size], OneOrMany::values);
        let lr: Vec<f64> = self
            .lr
            .as_ref()
            .map_or(vec![d.learning_rate], |v| v.values().into_iter().map(Number::get).collect());
        let iters = self.iters.as_ref().map_or(vec![d.iterations], OneOrMany::values);
        let seed = self.seed.as_ref().map_or(vec![d.seed], OneOrMany::values);
        let init: Vec<f64> = self
            .init_range
            .as_ref()
            .map_or(vec![d.init_range], |v| v.values().into_iter().map(Number::get).collect());
        let dedup_scope = match self.dedup {
            Some(DedupName::All) => DedupScope::AllInputs,
            _ => DedupScope::Cone,
        };
        let mut out = Vec::new();
        for &batch_size in &batch {
            for &learning_rate in &lr {
                for &iterations in &iters {
                    for &seed in &seed {
                        for &init_range in &init {
                            out.push(SamplerConfig {
                                batch_size,
                                learning_rate,
                                iterations,
                                seed,
                                init_range,
                                dedup_scope,
                                threads: self.threads.unwrap_or(0),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Serialize)]
struct CellOutcome {
    cell: String,
    run: usize,
    report: Option<String>,
    total_unique: Option<usize>,
    error: Option<String>,
}

fn cell_inputs(cell: &Cell, root: &Path) -> CliResult<(Circuit, ConstraintSet)> {
    let format = match &cell.format {
        Some(f) => Some(f.parse::<SourceFormat>().map_err(|e| CliError::Input(e.to_string()))?),
        None => None,
    };
    let circuit = load_circuit(&root.join(&cell.circuit), format)?;
    let pins = match (&cell.constraints, &cell.pins) {
        (Some(path), None) => load_constraints(&root.join(path), &circuit)?,
        (None, Some(map)) => {
            let mut set = ConstraintSet::new();
            for (net, &v) in map {
                let id = circuit
                    .find_net(net)
                    .ok_or_else(|| CliError::Input(format!("unknown net `{net}`")))?;
                if v > 1 {
                    return Err(CliError::Input(format!("pin `{net}` must be 0 or 1")));
                }
                set.pin(id, v == 1).map_err(|e| CliError::Input(e.to_string()))?;
            }
            set
        }
        _ => return Err(CliError::Input("give exactly one of `constraints` or `pins`".into())),
    };
    Ok((circuit, pins))
}

fn series_rows(w: &mut csv::Writer<Vec<u8>>, cell: &str, run: usize, r: &RunReport) {
    for s in &r.iterations {
        w.serialize((
            cell,
            run,
            &r.circuit,
            r.config.batch_size,
            r.config.learning_rate,
            r.config.seed,
            s.iteration,
            s.new_unique,
            s.cumulative_unique,
            s.elapsed_ms,
            throughput(s.cumulative_unique, s.elapsed_ms),
            s.loss_mean,
        ))
        .unwrap();
    }
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult {
    let text = read_file(&args.manifest)?;
    let manifest: Manifest = toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.manifest.display())))?;
    if manifest.cells.is_empty() {
        return Err(CliError::Input("manifest has no [[cell]] entries".into()));
    }
    let root = args.manifest.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let mut series = csv::Writer::from_writer(Vec::new());
    series
        .write_record([
            "cell",
            "run",
            "circuit",
            "batch",
            "lr",
            "seed",
            "iteration",
            "new_unique",
            "cumulative_unique",
            "elapsed_ms",
            "throughput_per_s",
            "loss_mean",
        ])
        .unwrap();
    let mut outcomes = Vec::new();
    for cell in &manifest.cells {
        let configs = cell.grid.over(&manifest.defaults).configs();
        let inputs = cell_inputs(cell, root);
        for (run, config) in configs.iter().enumerate() {
            let result = inputs.as_ref().map_err(|e| e.to_string()).and_then(|(c, p)| {
                report::sample(&cell.circuit.display().to_string(), c, p, config).map_err(|e| e.to_string())
            });
            let outcome = match result {
                Ok((_, rep)) => {
                    let file = format!("{}_{run}.json", cell.name);
                    write_file(&args.out_dir.join(&file), &serde_json::to_string_pretty(&rep).unwrap())?;
                    series_rows(&mut series, &cell.name, run, &rep);
                    eprintln!("{} #{run}: {} unique, {:.0}/s", cell.name, rep.total_unique, rep.throughput_per_s);
                    CellOutcome {
                        cell: cell.name.clone(),
                        run,
                        report: Some(file),
                        total_unique: Some(rep.total_unique),
                        error: None,
                    }
                }
                Err(e) => {
                    eprintln!("{} #{run}: failed: {e}", cell.name);
                    CellOutcome {
                        cell: cell.name.clone(),
                        run,
                        report: None,
                        total_unique: None,
                        error: Some(e),
                    }
                }
            };
            outcomes.push(outcome);
        }
    }
    let csv_text = String::from_utf8(series.into_inner().unwrap()).unwrap();
    write_file(&args.out_dir.join("series.csv"), &csv_text)?;
    write_file(
        &args.out_dir.join("summary.json"),
        &serde_json::to_string_pretty(&outcomes).unwrap(),
    )?;
    let failed = outcomes.iter().filter(|o| o.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::Partial(format!("{failed} of {} runs failed", outcomes.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_and_defaults() {
        let m: Manifest = toml::from_str(
            "[defaults]\nbatch = 100\nseed = [1, 2]\n[[cell]]\nname = \"x\"\ncircuit = \"c.v\"\npins = { y = 1 }\nlr = [1, 2.5]\n",
        )
        .unwrap();
        let cfgs = m.cells[0].grid.over(&m.defaults).configs();
        assert_eq!(cfgs.len(), 4);
        assert!(cfgs.iter().all(|c| c.batch_size == 100 && c.iterations == 10));
        assert_eq!(cfgs[1].learning_rate, 1.0);
        assert_eq!(cfgs[1].seed, 2);
        assert_eq!(cfgs[3].learning_rate, 2.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Manifest>("[[cell]]\nname = \"x\"\ncircuit = \"c.v\"\nbogus = 1\n").is_err());
    }
}
