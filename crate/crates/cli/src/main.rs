use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use setfusion::solvers::SearchBudget;

mod commands;
mod input;
mod report;
mod transfer;

use report::{BudgetEcho, Report};

#[derive(Parser, Debug)]
#[command(name = "setfusion", version, about = "Exact set-system complexity solvers, verifiers and compilers")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Worker threads for the solvers (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 3)]
    pub budget_depth: usize,
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub budget_states: u64,
    #[arg(long, global = true, default_value_t = 300.0)]
    pub budget_seconds: f64,
    /// Write the witness certificate of the run to this path.
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact value of a complexity measure.
    Solve(commands::SolveArgs),
    /// Check a construction, cyclic sequence or pair-family certificate.
    Verify(commands::VerifyArgs),
    /// Turn a pair-family certificate into a cyclic or acyclic construction.
    Compile(commands::CompileArgs),
    /// Decide whether the target is constructible at all.
    Finiteness(commands::TargetArgs),
    /// Map sets or constructions through φ between grids and hypercubes.
    Transfer(commands::TransferArgs),
    /// Every measure on the non-equality graph of size N.
    Neq(commands::NeqArgs),
    /// Build and check the cyclic generation circuit for a rule set.
    Genrules(commands::GenrulesArgs),
    /// Randomized experiments.
    #[command(subcommand)]
    Experiment(commands::Experiment),
    /// Closed-form bounds.
    #[command(subcommand)]
    Bounds(commands::Bounds),
}

/// How a command finished, in increasing severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Finish {
    Ok,
    BudgetExhausted,
    VerificationFailed,
}

impl Finish {
    fn code(self) -> u8 {
        match self {
            Finish::Ok => 0,
            Finish::BudgetExhausted => 2,
            Finish::VerificationFailed => 3,
        }
    }
}

pub struct Outcome {
    pub results: Vec<serde_json::Value>,
    pub finish: Finish,
    /// Certificate written by `--emit`.
    pub certificate: Option<String>,
}

impl Global {
    pub fn budget(&self) -> Result<SearchBudget, input::InputError> {
        if !(self.budget_seconds.is_finite() && self.budget_seconds > 0.0) {
            return input::fail("--budget-seconds must be positive");
        }
        Ok(SearchBudget {
            max_depth: self.budget_depth,
            max_states: self.budget_states,
            max_time: Duration::from_secs_f64(self.budget_seconds),
        })
    }
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<(Report, Finish), input::InputError> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return input::fail("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let budget = cli.global.budget()?;
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command, &budget)?;
    if let Some(path) = &cli.global.emit {
        let Some(text) = &outcome.certificate else {
            return input::fail("this run produced no witness to emit");
        };
        std::fs::write(path, text).map_err(|e| input::InputError(format!("{}: {e}", path.display())))?;
    }
    let report = Report {
        command: argv,
        budget: BudgetEcho::from(&budget),
        results: outcome.results,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok((report, outcome.finish))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::iter::once("setfusion".to_string()).chain(std::env::args().skip(1)).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli, argv) {
        Ok((report, finish)) => {
            match cli.global.format {
                Format::Human => print!("{}", report.to_human()),
                Format::Machine => print!("{}", report.to_machine()),
            }
            ExitCode::from(finish.code())
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(1)
        }
    }
}
