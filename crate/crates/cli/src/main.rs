//! `xstable`: exponent-function lattices, independence diagnostics,
//! verification suites and simulation for simple max-stable models.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage or
//! schema error. Every invocation emits one JSON run report, written to
//! `report.json` under `--out` or to stderr.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{CliError, RunReport};

#[derive(Debug, Parser)]
#[command(name = "xstable", version, about = "Dependence structure of simple max-stable laws")]
struct Cli {
    /// Worker threads for grid sweeps and simulation.
    #[arg(long, global = true, env = "XSTABLE_THREADS")]
    threads: Option<usize>,

    /// Directory for CSV outputs and report.json; stdout/stderr otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// V, d and chi tables at one point, plus round-trip residuals.
    Lattice(LatticeArgs),
    /// Independence and conditional-independence diagnostics for pairs of blocks.
    Diag(DiagArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Simulate a max-linear model and compare the ECDF with exp(-V).
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct LatticeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Evaluation point x1,...,xd.
    #[arg(long)]
    point: String,
}

#[derive(Debug, Args)]
struct DiagArgs {
    #[arg(long)]
    model: PathBuf,
    /// Block pair "A;B" with labels inside a block joined by "+"; repeatable.
    #[arg(long = "sets", required_unless_present = "all_pairs")]
    sets: Vec<String>,
    /// Every pair of distinct single indices.
    #[arg(long, conflicts_with = "sets")]
    all_pairs: bool,
    /// default | tensor:l1,l2,... | point:x1,...,xd
    #[arg(long, conflicts_with = "point")]
    grid: Option<String>,
    /// Single evaluation point, same as --grid point:...
    #[arg(long)]
    point: Option<String>,
    /// Verdict tolerance; defaults to 1e-9 (1 + |I|).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// mobius | lemmas | theorem | density | simulate | all
    #[arg(long)]
    suite: String,
    /// Optional model checked in addition to, or instead of, the fixtures.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// Sample size of the simulation suite.
    #[arg(long, default_value_t = 200_000)]
    n: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<bool, CliError> {
    configure_threads(cli.threads)?;
    let out = cli.out.as_deref();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    match &cli.command {
        Command::Lattice(a) => commands::lattice(&a.model, &a.point, out, report),
        Command::Diag(a) => commands::diag(
            &a.model,
            &commands::DiagRequest {
                sets: &a.sets,
                all_pairs: a.all_pairs,
                grid: a.grid.as_deref(),
                point: a.point.as_deref(),
                tol: a.tol,
            },
            out,
            report,
        ),
        Command::Verify(a) => {
            commands::verify(&a.suite, a.model.as_deref(), a.seed, a.n, out, report)
        }
        Command::Simulate(a) => commands::simulate(&a.model, a.n, a.seed, out, report),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Lattice(_) => "lattice",
        Command::Diag(_) => "diag",
        Command::Verify(_) => "verify",
        Command::Simulate(_) => "simulate",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let mut report = RunReport::new("unknown");
            report.fail(&CliError::Usage(e.kind().to_string()));
            report.finish(start, None);
            return ExitCode::from(2);
        }
    };
    let mut report = RunReport::new(command_name(&cli.command));
    let code = match run(&cli, &mut report) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            report.fail(&e);
            e.exit_code()
        }
    };
    report.finish(start, cli.out.as_deref());
    ExitCode::from(code)
}
