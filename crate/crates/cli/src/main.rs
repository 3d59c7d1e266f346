use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use refchain_cli::log::LogTable;
use refchain_cli::summary::{parse_pairs, summarize};
use refchain_cli::{run_scenario, CliError, RunOptions, Scenario, Simulation};

#[derive(Debug, Parser)]
#[command(name = "refchain", version, about = "Run and inspect chained-controller scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario and print its tracking report.
    Run {
        scenario: PathBuf,
        /// Write the cycle log here instead of the scenario's `log` path.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Inject timeline events from a separate thread.
        #[arg(long)]
        stress: bool,
    },
    /// Report tracking errors between channel pairs of a cycle log.
    Summarize {
        log: PathBuf,
        /// Comma-separated REFERENCE:MEASURED pairs, e.g. `jrg/position/*:q/*` or `trg/pose:ee`.
        #[arg(long)]
        pairs: String,
    },
    /// Parse a scenario and build its pipeline without running it.
    Validate { scenario: PathBuf },
}

fn execute(command: Command, out: &mut String) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, log, stress } => {
            let scenario = Scenario::load(&scenario)?;
            let report = run_scenario(&scenario, &RunOptions { log, stress })?;
            let _ = write!(out, "{report}");
        }
        Command::Summarize { log, pairs } => {
            let table = LogTable::read_csv(&log)?;
            let pairs = parse_pairs(&pairs, &table)?;
            for report in summarize(&table, &pairs)? {
                let _ = writeln!(out, "{report}");
            }
        }
        Command::Validate { scenario } => {
            let scenario = Scenario::load(&scenario)?;
            let sim = Simulation::new(&scenario)?;
            let _ = writeln!(
                out,
                "{}: ok ({} components, {} events, {} cycles)",
                scenario.name,
                sim.pipeline().component_names().len(),
                scenario.events.len(),
                scenario.cycles()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = execute(cli.command, &mut out);
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
