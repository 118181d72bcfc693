//! Failure-probability estimators and their per-run results.

mod dss;
mod mcs;
mod ss;

pub use dss::{run_dss, run_dss_observed, starvation_risk, DssConfig};
pub use mcs::{binomial_std_error, run_mcs};
pub use ss::{run_ss, run_ss_observed, SsConfig};

use serde::Serialize;

use crate::error::{ConfigError, RunError};
use crate::kernels::{mcmc_step, residual_resample, AcceptRegion, McmcConfig, Particle};
use crate::limit_state::{EvalCounter, LimitState};
use crate::partition::{BinIndex, Partition};
use crate::rng::{sample_standard_normal, Point, RandomStream};

pub const DEFAULT_RHO: f64 = 0.2;
pub const DEFAULT_EPS_TOL: f64 = 0.001;
pub const DEFAULT_MAX_LEVELS: usize = 50;

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Stopping rule satisfied.
    Converged,
    /// Level budget exhausted.
    MaxLevels,
    /// No bin left to explore but the mass of starved bins exceeds the
    /// tolerance.
    Unresolved,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxLevels => "max_levels",
            RunStatus::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinStatus {
    /// The local threshold reached zero and the bin estimate is frozen.
    Finished,
    /// Still being explored when the run stopped.
    Unresolved,
    /// Dropped after staying empty for several consecutive levels.
    Starved,
}

/// Final state of one bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinOutcome {
    pub bin: BinIndex,
    /// Level at which the bin finished.
    pub finish_level: Option<usize>,
    /// Fraction of the bin's particles in the failure domain at the finish
    /// level.
    pub p_fin: Option<f64>,
    /// Estimated `P(F ∩ B_j)`; zero unless finished.
    pub pi_hat: f64,
    pub status: BinStatus,
}

/// Snapshot of one level of a multi-level run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    /// Thresholds selected at this level, one per bin (zero once finished).
    pub thresholds: Vec<f64>,
    /// Particles per bin in this level's population.
    pub counts: Vec<usize>,
    /// Seeds carried to the next level, if there is one.
    pub seeds: Option<usize>,
    /// Sum of the estimates of finished bins.
    pub finished_mass: f64,
    /// Upper bound on the failure mass of bins not finished yet.
    pub unresolved_bound: f64,
}

/// Outcome of one estimator run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub pf_hat: f64,
    pub bin_outcomes: Vec<BinOutcome>,
    /// Number of populations sampled.
    pub levels: usize,
    pub n_evals: u64,
    pub unresolved_bound: f64,
    pub status: RunStatus,
    #[serde(skip)]
    pub trace: Vec<LevelRecord>,
    /// Failure-domain samples from the final level of each bin (multi-level
    /// estimators only).
    #[serde(skip)]
    pub failure_samples: Vec<Point>,
}

impl RunResult {
    pub fn pi_hats(&self) -> Vec<f64> {
        self.bin_outcomes.iter().map(|b| b.pi_hat).collect()
    }
}

/// Read-only view of a population, passed to level observers before the
/// level's thresholds are updated.
#[derive(Debug, Clone, Copy)]
pub struct LevelView<'a> {
    pub level: usize,
    pub particles: &'a [Particle],
    /// Thresholds the population was sampled under (`+∞` at level 0).
    pub thresholds: &'a [f64],
    /// Bins open to sampling at this level.
    pub active: &'a [bool],
}

/// Per-level records of a completed run.
pub fn level_snapshot(result: &RunResult) -> &[LevelRecord] {
    &result.trace
}

pub(crate) fn validate_rho(rho: f64) -> Result<(), ConfigError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(ConfigError::invalid(
            "rho",
            format!("must lie in (0, 1), got {rho}"),
        ));
    }
    Ok(())
}

pub(crate) fn initial_population(
    n: usize,
    ls: &LimitState,
    partition: &Partition,
    stream: &mut RandomStream,
    ctr: &mut EvalCounter,
) -> Vec<Particle> {
    (0..n)
        .map(|_| {
            let point = sample_standard_normal(stream, ls.dim());
            let g = ls.evaluate_unchecked(&point, ctr);
            let bin = partition.classify(&point);
            Particle { point, g, bin }
        })
        .collect()
}

/// Builds the next population of size `n` from the particles of `pop` lying
/// in `region`. Each seed is kept and extended by `count − 1` chain steps.
/// Returns the new population and the number of seeds.
#[allow(clippy::too_many_arguments)]
pub(crate) fn propagate<R: AcceptRegion>(
    pop: &[Particle],
    region: &R,
    n: usize,
    mcmc: &McmcConfig,
    ls: &LimitState,
    partition: &Partition,
    stream: &mut RandomStream,
    ctr: &mut EvalCounter,
    level: usize,
) -> Result<(Vec<Particle>, usize), RunError> {
    let seeds: Vec<&Particle> = pop
        .iter()
        .filter(|p| region.admits_bin(p.bin) && region.admits(p.bin, p.g))
        .collect();
    let offspring =
        residual_resample(seeds.len(), n, stream).map_err(|_| RunError::Extinction {
            level,
            n_evals: ctr.count(),
        })?;
    let mut next = Vec::with_capacity(n);
    for (seed, &count) in seeds.iter().zip(offspring.counts()) {
        if count == 0 {
            continue;
        }
        let mut cur = (*seed).clone();
        for _ in 1..count {
            let (moved, _) = mcmc_step(&cur, region, mcmc, stream, ls, partition, ctr);
            next.push(std::mem::replace(&mut cur, moved));
        }
        next.push(cur);
    }
    debug_assert_eq!(next.len(), n);
    Ok((next, seeds.len()))
}

pub(crate) fn failure_fraction<'a>(gs: impl ExactSizeIterator<Item = &'a f64>) -> f64 {
    let k = gs.len();
    gs.filter(|g| **g <= 0.0).count() as f64 / k as f64
}
