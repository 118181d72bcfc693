//! Replicated experiments and their summary statistics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Algorithm, Experiment, ExperimentConfig};
use crate::error::{ConfigError, RunError};
use crate::estimators::{binomial_std_error, run_dss, run_mcs, run_ss, RunResult, RunStatus};
use crate::limit_state::{LimitState, Registry};
use crate::rng::RandomStream;

pub type RunOutcome = Result<RunResult, RunError>;

/// Status column of `runs.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Converged,
    MaxLevels,
    Unresolved,
    Failed,
}

impl From<RunStatus> for RecordStatus {
    fn from(s: RunStatus) -> Self {
        match s {
            RunStatus::Converged => RecordStatus::Converged,
            RunStatus::MaxLevels => RecordStatus::MaxLevels,
            RunStatus::Unresolved => RecordStatus::Unresolved,
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordStatus::Converged => "converged",
            RecordStatus::MaxLevels => "max_levels",
            RecordStatus::Unresolved => "unresolved",
            RecordStatus::Failed => "failed",
        })
    }
}

impl FromStr for RecordStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "converged" => RecordStatus::Converged,
            "max_levels" => RecordStatus::MaxLevels,
            "unresolved" => RecordStatus::Unresolved,
            "failed" => RecordStatus::Failed,
            other => return Err(format!("unknown run status `{other}`")),
        })
    }
}

/// The per-run facts the summary is computed from; one row of `runs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    /// `None` for failed runs.
    pub pf_hat: Option<f64>,
    pub levels: usize,
    pub n_evals: u64,
    pub status: RecordStatus,
    pub pi_hats: Vec<f64>,
}

impl RunRecord {
    pub fn from_outcome(run_id: usize, outcome: &RunOutcome) -> Self {
        match outcome {
            Ok(r) => RunRecord {
                run_id,
                pf_hat: Some(r.pf_hat),
                levels: r.levels,
                n_evals: r.n_evals,
                status: r.status.into(),
                pi_hats: r.pi_hats(),
            },
            Err(e) => {
                let (levels, n_evals) = match e {
                    RunError::Extinction { level, n_evals } => (level + 1, *n_evals),
                    RunError::Config(_) => (0, 0),
                };
                RunRecord {
                    run_id,
                    pf_hat: None,
                    levels,
                    n_evals,
                    status: RecordStatus::Failed,
                    pi_hats: Vec::new(),
                }
            }
        }
    }

    /// Runs entering the mean, CoV and R statistics.
    pub fn is_usable(&self) -> bool {
        self.status != RecordStatus::Failed && self.pf_hat.is_some_and(|p| p > 0.0)
    }
}

pub fn records(outcomes: &[RunOutcome]) -> Vec<RunRecord> {
    outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| RunRecord::from_outcome(i, o))
        .collect()
}

/// One run of a resolved experiment on stream `stream_id`.
pub fn run_once(exp: &Experiment, stream_id: u64) -> RunOutcome {
    let cfg = &exp.config;
    let mut stream = RandomStream::new(cfg.seed, stream_id);
    match cfg.algorithm {
        Algorithm::Mcs => run_mcs(&exp.limit_state, cfg.n as u64, &mut stream),
        Algorithm::Ss => run_ss(&exp.limit_state, &cfg.ss_config(), &mut stream),
        Algorithm::Dss => run_dss(
            &exp.limit_state,
            &exp.partition,
            &cfg.dss_config(),
            &mut stream,
        ),
    }
}

/// Runs `cfg.runs` independent replications against the built-in problems.
/// Run `i` uses stream `i`, so the output is the same for any thread count.
pub fn replicate(cfg: &ExperimentConfig) -> Result<Vec<RunOutcome>, ConfigError> {
    let exp = cfg.resolve(&Registry::builtin())?;
    Ok(replicate_experiment(&exp, None))
}

/// Replicates a resolved experiment, on at most `jobs` threads when given.
pub fn replicate_experiment(exp: &Experiment, jobs: Option<usize>) -> Vec<RunOutcome> {
    let work = || -> Vec<RunOutcome> {
        (0..exp.config.runs as u64)
            .into_par_iter()
            .map(|i| run_once(exp, i))
            .collect()
    };
    match jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
        {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SummaryError {
    #[error("none of the {total} runs produced a positive estimate")]
    NoUsableRuns { total: usize },
    #[error("reference probability must be positive, got {0}")]
    BadReference(f64),
}

/// Statistics over replicated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    /// Total number of runs `m`.
    pub runs: usize,
    pub runs_used: usize,
    /// Runs excluded from the statistics: failed runs plus zero estimates.
    pub failed_runs: usize,
    /// Completed runs whose estimate is zero (included in `failed_runs`).
    pub zero_runs: usize,
    pub pf_ref: f64,
    pub mean_pf: f64,
    /// Sample standard deviation over the mean.
    pub cov: f64,
    /// Root mean square of `log10(pf_hat / pf_ref)`.
    pub r_metric: f64,
    pub mean_evals: f64,
    pub mean_levels: f64,
    /// Mean per-bin estimates.
    pub mean_pi: Vec<f64>,
}

/// Mean, CoV, R and average evaluation count over the runs with a positive
/// estimate.
pub fn summarize(records: &[RunRecord], pf_ref: f64) -> Result<ReplicationSummary, SummaryError> {
    if !(pf_ref > 0.0 && pf_ref.is_finite()) {
        return Err(SummaryError::BadReference(pf_ref));
    }
    let used: Vec<&RunRecord> = records.iter().filter(|r| r.is_usable()).collect();
    let k = used.len();
    if k == 0 {
        return Err(SummaryError::NoUsableRuns {
            total: records.len(),
        });
    }
    let kf = k as f64;
    let pf: Vec<f64> = used.iter().map(|r| r.pf_hat.unwrap_or(0.0)).collect();
    let mean_pf = pf.iter().sum::<f64>() / kf;
    let cov = if k > 1 {
        let var = pf.iter().map(|p| (p - mean_pf).powi(2)).sum::<f64>() / (kf - 1.0);
        var.sqrt() / mean_pf
    } else {
        0.0
    };
    let r_metric = (pf.iter().map(|p| (p / pf_ref).log10().powi(2)).sum::<f64>() / kf).sqrt();
    let nbins = used.iter().map(|r| r.pi_hats.len()).max().unwrap_or(0);
    let mut mean_pi = vec![0.0; nbins];
    for r in &used {
        for (acc, p) in mean_pi.iter_mut().zip(&r.pi_hats) {
            *acc += p;
        }
    }
    mean_pi.iter_mut().for_each(|m| *m /= kf);
    let zero_runs = records
        .iter()
        .filter(|r| r.status != RecordStatus::Failed && r.pf_hat == Some(0.0))
        .count();
    Ok(ReplicationSummary {
        runs: records.len(),
        runs_used: k,
        failed_runs: records.len() - k,
        zero_runs,
        pf_ref,
        mean_pf,
        cov,
        r_metric,
        mean_evals: used.iter().map(|r| r.n_evals as f64).sum::<f64>() / kf,
        mean_levels: used.iter().map(|r| r.levels as f64).sum::<f64>() / kf,
        mean_pi,
    })
}

/// Stored brute-force reference values of the built-in benchmarks
/// (10^8 samples each).
pub fn reference_probability(problem: &str) -> Result<f64, ConfigError> {
    match problem {
        "piecewise_linear" => Ok(3.19e-5),
        "beta_points" => Ok(1.33e-6),
        other => Err(ConfigError::UnknownProblem(other.to_owned())),
    }
}

/// Brute-force estimate with `samples` draws, and its binomial standard
/// error.
pub fn recompute_reference(
    ls: &LimitState,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64), RunError> {
    let r = run_mcs(ls, samples, &mut RandomStream::new(seed, 0))?;
    Ok((r.pf_hat, binomial_std_error(r.pf_hat, samples)))
}
