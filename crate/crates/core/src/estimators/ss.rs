use serde::{Deserialize, Serialize};

use super::{
    failure_fraction, initial_population, propagate, validate_rho, BinOutcome, BinStatus,
    LevelRecord, LevelView, RunResult, RunStatus, DEFAULT_MAX_LEVELS, DEFAULT_RHO,
};
use crate::error::{ConfigError, RunError};
use crate::kernels::{interp_quantile, BinThresholds, McmcConfig};
use crate::limit_state::{EvalCounter, LimitState};
use crate::partition::{BinIndex, Partition};
use crate::rng::RandomStream;

/// Parameters of a subset simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsConfig {
    /// Population size per level.
    pub n: usize,
    /// Level probability.
    pub rho: f64,
    pub mcmc: McmcConfig,
    pub max_levels: usize,
}

impl SsConfig {
    pub fn new(n: usize) -> Self {
        SsConfig {
            n,
            rho: DEFAULT_RHO,
            mcmc: McmcConfig::default(),
            max_levels: DEFAULT_MAX_LEVELS,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::invalid(
                "n",
                "population size must be at least 2",
            ));
        }
        validate_rho(self.rho)?;
        if self.max_levels == 0 {
            return Err(ConfigError::invalid("max_levels", "must be at least 1"));
        }
        Ok(())
    }
}

/// Subset simulation with adaptive thresholds.
///
/// Each threshold is the `rho`-quantile of the current limit-state values;
/// once it drops to zero (or the level budget is spent, in which case it is
/// forced to zero) the estimate is `rho^(T−1)·p̂_T`, with `p̂_T` the failure
/// fraction of the last population.
pub fn run_ss(
    ls: &LimitState,
    cfg: &SsConfig,
    stream: &mut RandomStream,
) -> Result<RunResult, RunError> {
    run_ss_observed(ls, cfg, stream, |_| {})
}

/// [`run_ss`], calling `observe` once per level with the population.
pub fn run_ss_observed<F: FnMut(&LevelView<'_>)>(
    ls: &LimitState,
    cfg: &SsConfig,
    stream: &mut RandomStream,
    mut observe: F,
) -> Result<RunResult, RunError> {
    cfg.validate()?;
    let partition = Partition::single_bin(ls.dim())?;
    let mut ctr = EvalCounter::new();
    let mut pop = initial_population(cfg.n, ls, &partition, stream, &mut ctr);
    let mut gamma = f64::INFINITY;
    let mut trace = Vec::new();
    let mut level = 0;
    loop {
        observe(&LevelView {
            level,
            particles: &pop,
            thresholds: &[gamma],
            active: &[true],
        });
        let gs: Vec<f64> = pop.iter().map(|p| p.g).collect();
        let next = interp_quantile(&gs, cfg.rho)?.min(gamma);
        let forced = level + 1 >= cfg.max_levels;
        if next <= 0.0 || forced {
            let p_fin = failure_fraction(gs.iter());
            let pf_hat = cfg.rho.powi(level as i32) * p_fin;
            trace.push(LevelRecord {
                level,
                thresholds: vec![0.0],
                counts: vec![pop.len()],
                seeds: None,
                finished_mass: pf_hat,
                unresolved_bound: 0.0,
            });
            let status = if next <= 0.0 {
                RunStatus::Converged
            } else {
                RunStatus::MaxLevels
            };
            return Ok(RunResult {
                pf_hat,
                bin_outcomes: vec![BinOutcome {
                    bin: BinIndex::new(0),
                    finish_level: Some(level),
                    p_fin: Some(p_fin),
                    pi_hat: pf_hat,
                    status: BinStatus::Finished,
                }],
                levels: level + 1,
                n_evals: ctr.count(),
                unresolved_bound: 0.0,
                status,
                trace,
                failure_samples: pop
                    .into_iter()
                    .filter(|p| p.g <= 0.0)
                    .map(|p| p.point)
                    .collect(),
            });
        }
        gamma = next;
        let thresholds = [gamma];
        let region = BinThresholds {
            thresholds: &thresholds,
            active: &[true],
        };
        let (new_pop, seeds) = propagate(
            &pop, &region, cfg.n, &cfg.mcmc, ls, &partition, stream, &mut ctr, level,
        )?;
        trace.push(LevelRecord {
            level,
            thresholds: vec![gamma],
            counts: vec![pop.len()],
            seeds: Some(seeds),
            finished_mass: 0.0,
            unresolved_bound: cfg.rho.powi(level as i32 + 1),
        });
        pop = new_pop;
        level += 1;
    }
}
