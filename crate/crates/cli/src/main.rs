//! `crossfree`: build and check supports of cross-free graph systems.
//!
//! Reports go to stdout (or `--output`) as JSON. Exit codes: 0 ok, 2 contract
//! violation or failed verification, 3 input error, 4 step budget exhausted,
//! 1 internal error.

mod commands;
mod format;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crossfree::solver::ProblemKind;
use crossfree::supports::{PipelineOptions, DEFAULT_STEP_BUDGET};
use crossfree::verify::HypergraphMode;
use crossfree::Execution;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] crossfree::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<crossfree::solver::SolverError> for CliError {
    fn from(e: crossfree::solver::SolverError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<crossfree::embedding::EmbeddingError> for CliError {
    fn from(e: crossfree::embedding::EmbeddingError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use crossfree::Error as E;
        match self {
            CliError::Input(_) => 3,
            CliError::Internal(_) | CliError::Core(E::Internal(_)) => 1,
            CliError::Core(E::Contract(_)) => 2,
            CliError::Core(E::BudgetExhausted { .. }) => 4,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Primal,
    Dual,
    Intersection,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Primal => "primal",
            Mode::Dual => "dual",
            Mode::Intersection => "intersection",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Mode as ValueEnum>::from_str(s, false)
    }
}

impl From<Mode> for HypergraphMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Primal => HypergraphMode::Primal,
            Mode::Dual => HypergraphMode::Dual,
            Mode::Intersection => HypergraphMode::Intersection,
        }
    }
}

#[derive(Parser)]
#[command(name = "crossfree", version, about = "Supports for cross-free graph systems on oriented surfaces")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Single-line JSON.
    #[arg(long, global = true)]
    compact: bool,
    /// Run data-parallel checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct PipelineArgs {
    /// System file.
    file: PathBuf,
    /// Re-check connectivity and cross-freeness after every rewrite.
    #[arg(long)]
    audit: bool,
    /// Maximum number of rewrites.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    budget: usize,
    /// Also write the support as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-freeness, non-piercing and host genus of each file.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Support of the blue terminals (needs a coloring).
    Primal(PipelineArgs),
    /// Support of the H members.
    Dual(PipelineArgs),
    /// Support of the H members with respect to K.
    Intersection(PipelineArgs),
    /// Check a support report against its system.
    Verify {
        file: PathBuf,
        support: PathBuf,
        /// Overrides the mode recorded in the support report.
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Color the hypergraph through its support.
    Color {
        file: PathBuf,
        #[arg(long)]
        mode: Mode,
    },
    /// Local search on the hypergraph of a system.
    Solve {
        file: PathBuf,
        #[arg(long)]
        kind: ProblemKind,
        /// Hypergraph to pose the problem on; defaults by kind.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        seed: u64,
        /// Uniform capacity for capacitated_packing.
        #[arg(long)]
        capacity: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        max_iterations: usize,
    },
    /// Random rectangle system on a grid.
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        torus: bool,
        /// Number of H members.
        #[arg(long)]
        count: usize,
        /// Number of K members.
        #[arg(long, default_value_t = 0)]
        k_count: usize,
        /// Probability that a vertex is red; omit for no coloring.
        #[arg(long)]
        red: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expand a grid shorthand file into explicit rotations.
    FromGrid {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let opts = |a: &PipelineArgs| PipelineOptions { budget: a.budget, audit: a.audit, exec };
    let pipeline = |a: &PipelineArgs, mode| commands::support(&a.file, mode, opts(a), a.dot.as_deref());
    match &cli.command {
        Command::Check { files } => commands::check(files),
        Command::Primal(a) => pipeline(a, Mode::Primal),
        Command::Dual(a) => pipeline(a, Mode::Dual),
        Command::Intersection(a) => pipeline(a, Mode::Intersection),
        Command::Verify { file, support, mode } => commands::verify(file, support, *mode),
        Command::Color { file, mode } => commands::color(file, *mode, PipelineOptions { exec, ..Default::default() }),
        Command::Solve { file, kind, mode, k, seed, capacity, max_iterations } => commands::solve(
            file,
            &commands::SolveArgs { kind: *kind, mode: *mode, k: *k, seed: *seed, capacity: *capacity, max_iterations: *max_iterations, exec },
        ),
        Command::Gen { rows, cols, torus, count, k_count, red, seed, out } => commands::gen(
            &commands::GenArgs { rows: *rows, cols: *cols, torus: *torus, count: *count, k_count: *k_count, red: *red, seed: *seed },
            out,
        ),
        Command::FromGrid { file, out } => commands::from_grid(file, out),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| {
        let text = if cli.compact {
            serde_json::to_string(&r).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))?
        } else {
            format::to_json(&r)?
        };
        emit(&text, cli.output.as_deref())?;
        Ok(r.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
