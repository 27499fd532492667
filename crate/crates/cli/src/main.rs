mod analyze;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eqtrack_core::geometry::{EquilibriumKind, Norm};

#[derive(Debug, Parser)]
#[command(name = "eqtrack", version, about = "Learning dynamics in time-varying repeated games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a preset or a config file and write summary.csv plus manifest.json.
    Run(run::RunArgs),
    /// Equilibrium geometry and welfare one-shots for a stage game file.
    Analyze(analyze::AnalyzeArgs),
    /// Print the available preset names.
    ListPresets,
}

pub(crate) fn parse_norm(s: &str) -> Result<Norm, String> {
    s.parse().map_err(|e: eqtrack_core::Error| e.to_string())
}

pub(crate) fn parse_kind(s: &str) -> Result<EquilibriumKind, String> {
    s.parse().map_err(|e: eqtrack_core::Error| e.to_string())
}

/// Accepts plain integers and integral scientific notation such as `1e5`.
pub(crate) fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => Ok(x as usize),
        _ => Err(format!("expected a non-negative integer, got {s:?}")),
    }
}

pub(crate) fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::run(args),
        Command::Analyze(args) => analyze::analyze(args),
        Command::ListPresets => {
            for name in eqtrack_core::presets::PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
