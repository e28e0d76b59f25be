use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smtlab_cli::{compare_bounds, exit, load_scenario, run, RunOptions, SelectError};

#[derive(Parser)]
#[command(name = "smtlab", version, about = "Verify second-main-theorem identities and inequalities on polynomial curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on a scenario and write CSV and JSON reports.
    Run {
        scenario: PathBuf,
        /// Comma-separated check names or glob patterns, e.g. `fmt,mc-*`.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long, env = "SMTLAB_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "smtlab-out")]
        out: PathBuf,
    },
    /// Print the coefficient comparison table.
    Bounds {
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Load and preflight a scenario without running checks.
    Validate { scenario: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let mut out = String::new();
    let code = dispatch(cli.command, &mut out);
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().write_all(out.as_bytes());
    ExitCode::from(code as u8)
}

fn load(path: &PathBuf) -> Result<smtlab_cli::Scenario, i32> {
    load_scenario(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        exit::SCENARIO_ERROR
    })
}

fn dispatch(command: Command, out: &mut String) -> i32 {
    match command {
        Command::Validate { scenario } => match load(&scenario) {
            Ok(s) => {
                let inst = &s.instance;
                let _ = writeln!(
                    out,
                    "{}: ok (q = {}, d = {}, M = {}, Delta = {})",
                    s.name(),
                    inst.q(),
                    inst.d(),
                    inst.truncation(),
                    inst.delta.value
                );
                exit::PASS
            }
            Err(code) => code,
        },
        Command::Bounds { scenario, json } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match compare_bounds(&s) {
                Ok(table) if json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&table).unwrap());
                    exit::PASS
                }
                Ok(table) => {
                    let _ = writeln!(out, "{table}");
                    exit::PASS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::SCENARIO_ERROR
                }
            }
        }
        Command::Run { scenario, checks, seed, samples, nodes, workers, out: dir } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let options = RunOptions { checks, seed, samples, nodes, workers };
            let report = match run(&s, &options) {
                Ok(r) => r,
                Err(e @ (SelectError::Unknown(_) | SelectError::Pattern(_))) => {
                    eprintln!("error: {e}");
                    return exit::USAGE;
                }
            };
            if let Err(e) = report.write(&dir) {
                eprintln!("error: writing reports to {}: {e}", dir.display());
                return exit::SCENARIO_ERROR;
            }
            for c in &report.checks {
                match &c.error {
                    Some(e) => writeln!(out, "{:<20} error: {e}", c.name),
                    None => writeln!(out, "{:<20} {:?}", c.name, c.status),
                }
                .expect("writing to a String");
            }
            let _ = writeln!(out, "{}: {:?}", report.scenario, report.summary);
            if report.passed() {
                exit::PASS
            } else {
                exit::CHECK_FAILED
            }
        }
    }
}
