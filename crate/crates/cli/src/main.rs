//! `qnls` command-line driver.
//!
//! Exit codes: 0 success, 1 failed verification or I/O error, 2 invalid
//! configuration, 3 numerical failure (details in `error.json`).

mod config;
mod failure;
mod reconstruct;
mod report;
mod simulate;
mod sweep;
mod verify;

use clap::{Parser, Subcommand};
use config::{CurveConfig, RunConfig, SweepConfig};
use failure::Failure;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use verify::Suite;

#[derive(Parser)]
#[command(name = "qnls", version, about = "SU(2) NLS-type systems: simulation, verification, curve flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and write a trajectory directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites and emit a JSON report.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `verify.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid in parallel and write `summary.csv`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Build a curve and its normal complex structure; optionally evolve it.
    ReconstructCurve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-summarize a trajectory or sweep output directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(anyhow::Error::from)?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let mut cfg: RunConfig = config::load(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.out = out.unwrap_or(cfg.out);
            print_json(&simulate::simulate(&cfg)?)
        }
        Command::Verify { suite, seed, out } => {
            let rep = verify::run_suite(suite, seed);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(anyhow::Error::from)?;
                qnls::io::write_json(&dir.join("verify.json"), &rep)?;
            }
            print_json(&rep)?;
            match rep.failed() {
                0 => Ok(()),
                failed => Err(Failure::Verify { failed }),
            }
        }
        Command::Sweep { config, seed, out, jobs } => {
            let mut cfg: SweepConfig = config::load(&config)?;
            cfg.template.seed = seed.unwrap_or(cfg.template.seed);
            cfg.out = out.unwrap_or(cfg.out);
            let rows = sweep::sweep(&cfg, jobs)?;
            let ok = rows.iter().filter(|r| r.status == "ok").count();
            println!("{ok}/{} sweep cells succeeded; wrote {}", rows.len(), cfg.out.join("summary.csv").display());
            Ok(())
        }
        Command::ReconstructCurve { config, seed, out } => {
            let mut cfg: CurveConfig = config::load(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.out = out.unwrap_or(cfg.out);
            print_json(&reconstruct::reconstruct(&cfg)?)
        }
        Command::Report { out } => print_json(&report::report(&out)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
