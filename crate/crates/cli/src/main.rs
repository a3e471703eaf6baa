//! uhpcflex command line.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 solver nonconvergence,
//! 3 acceptance thresholds not met (`validate`).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uhpcflex::bench::data_dir;

use commands::*;
use output::{emit, emit_error, CliError, Format};

#[derive(Debug, Parser)]
#[command(name = "uhpcflex", version, about = "Flexural analysis of reinforced and prestressed UHPC beams")]
struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format; defaults to CSV for a `.csv` --out path, JSON otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout. On failure the file holds a
    /// JSON error report instead.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.out.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive a UHPC law from a material record and tabulate its envelope.
    Material(MaterialArgs),
    /// Moment–curvature response of a beam's section.
    Mk(MkArgs),
    /// Localization and ultimate moments by the stress-block method.
    Strength(StrengthArgs),
    /// ω and predicted failure path for every database row.
    Classify(ClassifyArgs),
    /// Four-point bending load–deflection analysis.
    Simulate(SimulateArgs),
    /// One-parameter sweep around a database row.
    Sweep(SweepArgs),
    /// Check ω, classification and strength against the printed values.
    Validate(ValidateArgs),
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::input)?;
    }
    let data = data_dir();
    let report = match &cli.command {
        Command::Material(a) => material(a)?,
        Command::Mk(a) => mk(a)?,
        Command::Strength(a) => strength_cmd(a)?,
        Command::Classify(a) => classify(a, &data)?,
        Command::Simulate(a) => simulate_cmd(a)?,
        Command::Sweep(a) => sweep_cmd(a, &data)?,
        Command::Validate(a) => validate(a, &data)?,
    };
    emit(&report, cli.output_format(), cli.out.as_deref())?;
    Ok(report.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            emit_error(&e, cli.out.as_deref());
            ExitCode::from(e.code as u8)
        }
    }
}
