use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use subsim::config::{Algorithm, ExperimentConfig};
use subsim::estimators::starvation_risk;
use subsim::harness::{
    recompute_reference, records, reference_probability, replicate_experiment, run_once, summarize,
    RunRecord,
};
use subsim::io::{
    log_histogram, write_hist_csv, write_levels_csv, write_runs_csv, write_summary_json,
    SummaryFile,
};
use subsim::{ConfigError, FormatError, Registry, RunError};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => c.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig = text.parse()?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| io_err(&path, e))
}

fn warn_starvation(cfg: &ExperimentConfig, exp: &subsim::config::Experiment) {
    if cfg.algorithm == Algorithm::Dss {
        if let Some(expected) = starvation_risk(cfg.n, &exp.partition) {
            eprintln!(
                "warning: smallest bin expects only {expected:.1} initial particles (n = {})",
                cfg.n
            );
        }
    }
}

pub fn run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = load_config(config, seed)?;
    let exp = cfg.resolve(&Registry::builtin())?;
    warn_starvation(&cfg, &exp);
    let result = run_once(&exp, 0)?;
    println!("problem: {}", cfg.problem);
    println!("algorithm: {}", cfg.algorithm.as_str());
    println!("pf_hat: {:e}", result.pf_hat);
    println!("levels: {}", result.levels);
    println!("n_evals: {}", result.n_evals);
    println!("status: {}", result.status.as_str());
    println!("unresolved_bound: {:e}", result.unresolved_bound);
    if cfg.algorithm == Algorithm::Dss {
        for b in &result.bin_outcomes {
            println!("pi_hat_{}: {:e}", b.bin.label(), b.pi_hat);
        }
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        write_levels_csv(create(dir, "levels.csv")?, &result.trace)?;
    }
    Ok(())
}

pub fn replicate(
    config: &Path,
    runs: usize,
    out: &Path,
    seed: Option<u64>,
    jobs: Option<usize>,
    pf_ref: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = load_config(config, seed)?;
    cfg.runs = runs;
    let exp = cfg.resolve(&Registry::builtin())?;
    warn_starvation(&cfg, &exp);
    let outcomes = replicate_experiment(&exp, jobs);
    let recs = records(&outcomes);
    let pf_ref = pf_ref
        .or_else(|| reference_probability(&cfg.problem).ok())
        .or_else(|| mean_estimate(&recs));

    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let bins = if cfg.algorithm == Algorithm::Dss {
        exp.partition.num_bins()
    } else {
        0
    };
    write_runs_csv(create(out, "runs.csv")?, &recs, bins)?;
    write_hist_csv(create(out, "hist.csv")?, &log_histogram(&recs))?;

    let Some(pf_ref) = pf_ref else {
        return Err(CliError::Runtime(format!(
            "none of the {} runs produced a positive estimate",
            recs.len()
        )));
    };
    let summary = summarize(&recs, pf_ref).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_summary_json(
        create(out, "summary.json")?,
        &SummaryFile::new(summary.clone(), &cfg),
    )?;
    println!(
        "{:<10} {:>12} {:>8} {:>8} {:>10} {:>6} {:>6}",
        "algorithm", "mean_pf", "cov", "R", "N_T", "used", "failed"
    );
    println!(
        "{:<10} {:>12.3e} {:>8.2} {:>8.2} {:>10.0} {:>6} {:>6}",
        cfg.algorithm.as_str(),
        summary.mean_pf,
        summary.cov,
        summary.r_metric,
        summary.mean_evals,
        summary.runs_used,
        summary.failed_runs
    );
    Ok(())
}

fn mean_estimate(recs: &[RunRecord]) -> Option<f64> {
    let used: Vec<f64> = recs
        .iter()
        .filter(|r| r.is_usable())
        .filter_map(|r| r.pf_hat)
        .collect();
    (!used.is_empty()).then(|| used.iter().sum::<f64>() / used.len() as f64)
}

pub fn reference(problem: &str, samples: u64, seed: u64) -> Result<(), CliError> {
    let ls = Registry::builtin().lookup(problem)?;
    let (pf, se) = recompute_reference(&ls, samples, seed)?;
    println!("problem: {problem}");
    println!("samples: {samples}");
    println!("pf_hat: {pf:e}");
    println!("std_error: {se:e}");
    if let Ok(stored) = reference_probability(problem) {
        println!("stored_reference: {stored:e}");
    }
    Ok(())
}
