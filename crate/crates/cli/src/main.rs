//! `relaxsat` command-line driver.

mod bench;
mod info;
mod report;
mod sample;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relaxsat::{Circuit, ConstraintSet, DedupScope, SamplerConfig, SourceFormat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
            CliError::Partial(_) => 4,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "relaxsat", version, about = "Gradient-descent CircuitSAT sampler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample satisfying input assignments.
    Sample(SampleArgs),
    /// Re-check a solutions file with the exact simulator.
    Verify(VerifyArgs),
    /// Tseytin-encode a circuit (plus pins) as DIMACS CNF.
    ExportCnf(ExportArgs),
    /// Print circuit statistics.
    Info(InfoArgs),
    /// Run a manifest of sampling experiments.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Verilog,
    Blif,
    Bench,
}

impl From<FormatArg> for SourceFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Verilog => SourceFormat::Verilog,
            FormatArg::Blif => SourceFormat::Blif,
            FormatArg::Bench => SourceFormat::Bench,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    Cone,
    All,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Defaults to the file extension (.v, .blif, .bench).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    batch: usize,
    #[arg(long, default_value_t = 15.0)]
    lr: f64,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    init_range: f64,
    #[arg(long, value_enum, default_value = "cone")]
    dedup: DedupArg,
    /// Solutions file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run report (JSON).
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write every primary input, not only the support cone.
    #[arg(long)]
    emit_all_inputs: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long)]
    solutions: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// DIMACS file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn load_circuit(path: &Path, format: Option<SourceFormat>) -> CliResult<Circuit> {
    let format = match format {
        Some(f) => f,
        None => SourceFormat::from_path(path).ok_or_else(|| {
            CliError::Input(format!(
                "cannot infer the format of {}; pass --format",
                path.display()
            ))
        })?,
    };
    let text = read_file(path)?;
    relaxsat::parse(&text, format).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_constraints(path: &Path, circuit: &Circuit) -> CliResult<ConstraintSet> {
    let text = read_file(path)?;
    ConstraintSet::parse(&text, circuit).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl CircuitArgs {
    fn load(&self) -> CliResult<Circuit> {
        load_circuit(&self.circuit, self.format.map(Into::into))
    }
}

impl SampleArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig {
            batch_size: self.batch,
            learning_rate: self.lr,
            iterations: self.iters,
            seed: self.seed,
            init_range: self.init_range,
            dedup_scope: match self.dedup {
                DedupArg::Cone => DedupScope::Cone,
                DedupArg::All => DedupScope::AllInputs,
            },
            threads: self.threads,
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Sample(args) => sample::cmd_sample(&args),
        Command::Verify(args) => sample::cmd_verify(&args),
        Command::ExportCnf(args) => info::cmd_export_cnf(&args),
        Command::Info(args) => info::cmd_info(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
