//! `subsim`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run or file write fails, 2 for
//! configuration and usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "subsim",
    version,
    about = "Rare-event failure probability estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute a single run and print its estimate.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving levels.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replicate a configuration and write runs.csv, summary.json, hist.csv.
    Replicate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to all cores).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Reference probability for the R metric (defaults to the stored
        /// value of built-in benchmarks, else the mean estimate).
        #[arg(long)]
        pf_ref: Option<f64>,
    },
    /// Brute-force Monte Carlo estimate with its binomial standard error.
    Reference {
        #[arg(long)]
        problem: String,
        /// Sample count; scientific notation such as 1e7 is accepted.
        #[arg(long, value_parser = parse_count)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(k) = s.parse::<u64>() {
        return (k >= 1)
            .then_some(k)
            .ok_or_else(|| "must be at least 1".into());
    }
    let x: f64 = s.parse().map_err(|_| format!("invalid count `{s}`"))?;
    if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("invalid count `{s}`"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run { config, out, seed } => commands::run(&config, out.as_deref(), seed),
        Command::Replicate {
            config,
            runs,
            out,
            seed,
            jobs,
            pf_ref,
        } => commands::replicate(
            &config,
            runs as usize,
            &out,
            seed,
            jobs.map(|j| j as usize),
            pf_ref,
        ),
        Command::Reference {
            problem,
            samples,
            seed,
        } => commands::reference(&problem, samples, seed),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
