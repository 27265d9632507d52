use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use critmul_cli::{analyze, parse_problem_file, render_text, AnalyzeOptions, Report};

#[derive(Parser)]
#[command(name = "critmul", version, about = "Multiplier criticality and stability analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every point listed in the problem files.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        report: Format,
        /// Run the floating-point probes.
        #[arg(long)]
        probe: bool,
        /// Number of dyadic scales in residual tables and probes.
        #[arg(long = "probe-grid", value_name = "K")]
        probe_grid: Option<u32>,
        /// Newton stopping tolerance for probes.
        #[arg(long, value_name = "T")]
        tol: Option<f64>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Inconsistent(String),
}

fn run_one(path: &PathBuf, opts: &AnalyzeOptions) -> Result<Report, Failure> {
    let problem = parse_problem_file(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Input)?;
    match catch_unwind(AssertUnwindSafe(|| analyze(&problem, opts))) {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(e)) => Err(Failure::Input(anyhow::Error::new(e).context(format!("analyzing {}", path.display())))),
        Err(_) => Err(Failure::Inconsistent(format!("internal check failed while analyzing {}", path.display()))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Analyze { files, report, probe, probe_grid, tol } = cli.command;
    let opts = AnalyzeOptions { probe, grid: probe_grid, tol };
    let mut reports = Vec::new();
    let mut inconsistent = false;
    for path in &files {
        match run_one(path, &opts) {
            Ok(r) => {
                if !r.consistent {
                    eprintln!("error: {}: equivalent characterizations disagree", path.display());
                    inconsistent = true;
                }
                reports.push(r);
            }
            Err(Failure::Input(e)) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            Err(Failure::Inconsistent(msg)) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        }
    }
    let out = match report {
        Format::Json if reports.len() == 1 => serde_json::to_string_pretty(&reports[0]),
        Format::Json => serde_json::to_string_pretty(&reports),
        Format::Text => Ok(reports.iter().map(render_text).collect::<Vec<_>>().join("\n")),
    };
    match out {
        Ok(s) => {
            if let Err(e) = writeln!(std::io::stdout().lock(), "{s}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if inconsistent {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
