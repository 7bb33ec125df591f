//! `pinchext` batch driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pinchext_core::report::to_canonical_json;

use commands::{Failure, Report, EXIT_NEGATIVE, EXIT_USAGE};
use config::AnalysisConfig;

#[derive(Parser)]
#[command(
    name = "pinchext",
    version,
    about = "Meromorphic extension along analytic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Analysis config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving `<command>.json` and `<command>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Extendability verdict for every curve.
    Test,
    /// Coefficient ladder, pinched domain and bound check.
    Ladder,
    /// Test-sequence and general-position checks of the curves.
    Validate,
    /// Witness computations for a named gallery function.
    Gallery,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Test => "test",
            Command::Ladder => "ladder",
            Command::Validate => "validate",
            Command::Gallery => "gallery",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn thread_pool() -> Result<(), Failure> {
    let Ok(v) = std::env::var("PINCHEXT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "PINCHEXT_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn write_outputs(dir: &Path, name: &str, json: &str, csv: Option<&str>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::usage(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(format!("{name}.json")), json).map_err(io)?;
    if let Some(csv) = csv {
        fs::write(dir.join(format!("{name}.csv")), csv).map_err(io)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    thread_pool()?;
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::usage("--config <path> is required"))?;
    let cfg = AnalysisConfig::load(path).map_err(|e| Failure::usage(e.to_string()))?;
    let report: Report = match cli.command {
        Command::Test => commands::cmd_test(&cfg)?,
        Command::Ladder => commands::cmd_ladder(&cfg)?,
        Command::Validate => commands::cmd_validate(&cfg)?,
        Command::Gallery => commands::cmd_gallery(&cfg)?,
    };
    let json = to_canonical_json(&report.json).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(dir) = cli.out.as_ref().or(cfg.out_dir.as_ref()) {
        write_outputs(dir, cli.command.name(), &json, report.csv.as_deref())?;
    }
    let text = match cli.format {
        Format::Json => json.as_str(),
        Format::Csv => report
            .csv
            .as_deref()
            .ok_or_else(|| Failure::usage("this command has no csv output"))?,
    };
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(if report.negative { EXIT_NEGATIVE } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
