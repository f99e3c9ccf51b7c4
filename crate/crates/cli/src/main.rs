use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sojourn_cli::{compare, run, worker_count, write_outputs, CliError, ResultTable, Scenario, Tolerances};

#[derive(Parser)]
#[command(name = "sojourn", version, about = "Traversal, dwell and sojourn timescale sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its table.
    Run {
        scenario: PathBuf,
        /// Worker threads; overrides SOJOURN_WORKERS.
        #[arg(long)]
        workers: Option<usize>,
        /// Write the table here instead of the scenario's output path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Compare two tables cell by cell.
    Compare {
        table: PathBuf,
        reference: PathBuf,
        /// Relative tolerance: `1e-6` or `default=1e-8,sojourn=1e-4`.
        #[arg(long, default_value = "1e-12")]
        tol: String,
        /// Compare column A of the table with column B of the reference.
        #[arg(long = "pair", value_name = "A=B")]
        pairs: Vec<String>,
    },
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            scenario,
            workers,
            output,
        } => {
            let mut s = Scenario::load(&scenario)?;
            let base = match output {
                Some(p) => {
                    s.output.path = p;
                    std::env::current_dir().unwrap_or_default()
                }
                None => base_dir(&scenario),
            };
            let out = run(&s, worker_count(workers))?;
            for p in write_outputs(&s, &out, &base)? {
                eprintln!("wrote {}", p.display());
            }
            eprintln!("{}", sojourn_cli::run::summary(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario } => {
            let s = Scenario::load(&scenario)?;
            println!(
                "ok: {} sweep over {} points, digest {}",
                s.sweep.parameter,
                s.sweep.grid()?.len(),
                s.digest()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            table,
            reference,
            tol,
            pairs,
        } => {
            let tol = Tolerances::parse(&tol)?;
            let pairs = pairs
                .iter()
                .map(|p| {
                    p.split_once('=')
                        .map(|(a, b)| (a.to_string(), b.to_string()))
                        .ok_or_else(|| CliError::invalid("--pair", format!("`{p}` is not of the form A=B")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let report = compare(
                &ResultTable::read(&table)?,
                &ResultTable::read(&reference)?,
                &tol,
                &pairs,
            )?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(2)
        }
    }
}
