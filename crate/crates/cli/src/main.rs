mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Failure, Reported};

/// Common fixed points of two, three and four self-mappings.
#[derive(Parser, Debug)]
#[command(name = "cofix", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the metric axioms, coefficients, contractive condition and
    /// range inclusions of a problem file.
    Check(FileArgs),
    /// Alternating iteration for a two-map problem.
    Solve(SolveArgs),
    /// Three-map pipeline: restrict, induce, iterate, pull back, lift.
    Solve3(PipelineArgs),
    /// Four-map pipeline.
    Solve4(PipelineArgs),
    /// Print the induced two-map instance of a three- or four-map problem.
    Reduce(FileArgs),
    /// Enumerate fixed and coincidence points of a finite problem.
    Oracle(FileArgs),
    /// Generate seeded instances and compare the solvers with the oracle.
    Fuzz(FuzzArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    #[value(alias = "json")]
    Structured,
}

#[derive(Args, Debug)]
pub struct FileArgs {
    /// Problem file (JSON).
    pub file: PathBuf,
    /// Tolerance for the condition check and, when solving, the stopping
    /// rule and residuals.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed of the pair sampler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check the condition on this many sampled pairs instead of the
    /// file's pair source.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub file: FileArgs,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Start point: a label, `#index` or an index on finite spaces;
    /// comma-separated coordinates on Euclidean spaces.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Include every iterate and step in the report.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Stop at the point of coincidence instead of lifting.
    #[arg(long)]
    pub coincidence_only: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Contraction,
    Random,
    Identity,
    Constant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    Independent,
    Shared,
    Identity,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Number of generated instances.
    #[arg(long, visible_alias = "samples", default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    /// 2, 3 or 4; cycles through all three when omitted.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
    pub arity: Option<u8>,
    #[arg(long, value_enum, default_value_t = ModeArg::Contraction)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = AnchorArg::Independent)]
    pub anchors: AnchorArg,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, format, result) = match &cli.command {
        Command::Check(a) => ("check", a.format, commands::check(a)),
        Command::Solve(a) => ("solve", a.file.format, commands::solve(a)),
        Command::Solve3(a) => ("solve3", a.solve.file.format, commands::solve_pipeline(a, 3)),
        Command::Solve4(a) => ("solve4", a.solve.file.format, commands::solve_pipeline(a, 4)),
        Command::Reduce(a) => ("reduce", a.format, commands::reduce(a)),
        Command::Oracle(a) => ("oracle", a.format, commands::oracle(a)),
        Command::Fuzz(a) => ("fuzz", a.format, commands::fuzz(a)),
    };
    let code = emit(name, format, result);
    ExitCode::from(code)
}

fn emit(name: &str, format: Format, result: Result<Reported, Failure>) -> u8 {
    let code = match &result {
        Ok(r) => r.code,
        Err(f) => f.code,
    };
    let mut out = std::io::stdout().lock();
    match format {
        Format::Structured => {
            let envelope = commands::envelope(name, &result);
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&envelope).expect("reports serialize"));
        }
        Format::Human => match &result {
            Ok(r) => {
                let _ = write!(out, "{}", r.human);
            }
            Err(f) => {
                if let Some(h) = &f.human {
                    let _ = write!(out, "{h}");
                }
                eprintln!("error [{}]: {}", f.stage, f.message);
            }
        },
    }
    code
}
