use serde::{Deserialize, Serialize};

use super::{
    failure_fraction, initial_population, propagate, validate_rho, BinOutcome, BinStatus,
    LevelRecord, LevelView, RunResult, RunStatus, DEFAULT_EPS_TOL, DEFAULT_MAX_LEVELS, DEFAULT_RHO,
};
use crate::error::{ConfigError, RunError};
use crate::kernels::{interp_quantile, BinThresholds, McmcConfig};
use crate::limit_state::{EvalCounter, LimitState};
use crate::partition::{BinIndex, Partition};
use crate::rng::RandomStream;

/// Consecutive empty levels after which an active bin is given up.
const STARVATION_LEVELS: usize = 3;

/// Parameters of a directional subset simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DssConfig {
    pub n: usize,
    pub rho: f64,
    pub mcmc: McmcConfig,
    /// Relative tolerance of the stopping rule.
    pub eps_tol: f64,
    pub max_levels: usize,
}

impl DssConfig {
    pub fn new(n: usize) -> Self {
        DssConfig {
            n,
            rho: DEFAULT_RHO,
            mcmc: McmcConfig::default(),
            eps_tol: DEFAULT_EPS_TOL,
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
        if self.eps_tol.is_nan() || self.eps_tol <= 0.0 {
            return Err(ConfigError::invalid("eps_tol", "must be positive"));
        }
        if self.max_levels == 0 {
            return Err(ConfigError::invalid("max_levels", "must be at least 1"));
        }
        Ok(())
    }
}

/// Expected initial particle count of the least probable bin, when it is
/// below 10.
pub fn starvation_risk(n: usize, partition: &Partition) -> Option<f64> {
    let min = partition
        .probs()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let expected = n as f64 * min;
    (expected < 10.0).then_some(expected)
}

#[derive(Debug, Clone, Copy)]
enum BinState {
    Active {
        empty_levels: usize,
    },
    Finished {
        level: usize,
        p_fin: f64,
        pi_hat: f64,
    },
    Starved,
}

/// Directional subset simulation.
///
/// Every bin `B_j` of `partition` carries its own threshold `γ_j`, chosen
/// as the `rho`-quantile of the limit-state values of the bin's particles
/// (never increasing). A bin whose threshold reaches zero is finished: its
/// contribution `P(B_j)·rho^T_j·p̂_j` is frozen and the bin leaves the
/// sampling region. The run stops once the upper bound `P(B_j)·rho^(t+1)`
/// summed over unfinished bins is within `eps_tol` of the finished mass.
pub fn run_dss(
    ls: &LimitState,
    partition: &Partition,
    cfg: &DssConfig,
    stream: &mut RandomStream,
) -> Result<RunResult, RunError> {
    run_dss_observed(ls, partition, cfg, stream, |_| {})
}

/// [`run_dss`], calling `observe` once per level with the population.
pub fn run_dss_observed<F: FnMut(&LevelView<'_>)>(
    ls: &LimitState,
    partition: &Partition,
    cfg: &DssConfig,
    stream: &mut RandomStream,
    mut observe: F,
) -> Result<RunResult, RunError> {
    cfg.validate()?;
    ls.check_dim(partition.dim())?;
    let nbins = partition.num_bins();
    let probs = partition.probs();
    let mut ctr = EvalCounter::new();
    let mut pop = initial_population(cfg.n, ls, partition, stream, &mut ctr);
    let mut gamma = vec![f64::INFINITY; nbins];
    let mut state = vec![BinState::Active { empty_levels: 0 }; nbins];
    let mut active = vec![true; nbins];
    let mut starved_mass = 0.0;
    let mut failure_samples = Vec::new();
    let mut trace: Vec<LevelRecord> = Vec::new();
    let mut level = 0usize;

    loop {
        observe(&LevelView {
            level,
            particles: &pop,
            thresholds: &gamma,
            active: &active,
        });
        let mut by_bin: Vec<Vec<f64>> = vec![Vec::new(); nbins];
        for p in &pop {
            by_bin[p.bin.index()].push(p.g);
        }
        let tail = cfg.rho.powi(level as i32 + 1);

        for j in 0..nbins {
            let BinState::Active { empty_levels } = state[j] else {
                continue;
            };
            let gs = &by_bin[j];
            if gs.is_empty() {
                if empty_levels + 1 >= STARVATION_LEVELS {
                    state[j] = BinState::Starved;
                    active[j] = false;
                    starved_mass += probs[j] * tail;
                } else {
                    state[j] = BinState::Active {
                        empty_levels: empty_levels + 1,
                    };
                }
                continue;
            }
            let next = interp_quantile(gs, cfg.rho)?.min(gamma[j]);
            if next <= 0.0 {
                let p_fin = failure_fraction(gs.iter());
                state[j] = BinState::Finished {
                    level,
                    p_fin,
                    pi_hat: probs[j] * cfg.rho.powi(level as i32) * p_fin,
                };
                gamma[j] = 0.0;
                active[j] = false;
                failure_samples.extend(
                    pop.iter()
                        .filter(|p| p.bin.index() == j && p.g <= 0.0)
                        .map(|p| p.point.clone()),
                );
            } else {
                gamma[j] = next;
                state[j] = BinState::Active { empty_levels: 0 };
            }
        }

        let finished_mass: f64 = state
            .iter()
            .map(|s| match s {
                BinState::Finished { pi_hat, .. } => *pi_hat,
                _ => 0.0,
            })
            .sum();
        let unresolved_bound = starved_mass
            + (0..nbins)
                .filter(|&j| active[j])
                .map(|j| probs[j] * tail)
                .sum::<f64>();
        let within_tol = unresolved_bound <= cfg.eps_tol * finished_mass;
        let any_active = active.iter().any(|&a| a);

        let status = if finished_mass > 0.0 && within_tol {
            Some(RunStatus::Converged)
        } else if !any_active {
            Some(if within_tol {
                RunStatus::Converged
            } else {
                RunStatus::Unresolved
            })
        } else if level + 1 >= cfg.max_levels {
            Some(RunStatus::MaxLevels)
        } else {
            None
        };

        let mut record = LevelRecord {
            level,
            thresholds: gamma.clone(),
            counts: by_bin.iter().map(Vec::len).collect(),
            seeds: None,
            finished_mass,
            unresolved_bound,
        };

        if let Some(status) = status {
            trace.push(record);
            let bin_outcomes = state
                .iter()
                .enumerate()
                .map(|(j, s)| outcome(BinIndex::new(j), s))
                .collect();
            return Ok(RunResult {
                pf_hat: finished_mass,
                bin_outcomes,
                levels: level + 1,
                n_evals: ctr.count(),
                unresolved_bound,
                status,
                trace,
                failure_samples,
            });
        }

        let region = BinThresholds {
            thresholds: &gamma,
            active: &active,
        };
        let (new_pop, seeds) = propagate(
            &pop, &region, cfg.n, &cfg.mcmc, ls, partition, stream, &mut ctr, level,
        )?;
        record.seeds = Some(seeds);
        trace.push(record);
        pop = new_pop;
        level += 1;
    }
}

fn outcome(bin: BinIndex, state: &BinState) -> BinOutcome {
    match *state {
        BinState::Finished {
            level,
            p_fin,
            pi_hat,
        } => BinOutcome {
            bin,
            finish_level: Some(level),
            p_fin: Some(p_fin),
            pi_hat,
            status: BinStatus::Finished,
        },
        BinState::Active { .. } => BinOutcome {
            bin,
            finish_level: None,
            p_fin: None,
            pi_hat: 0.0,
            status: BinStatus::Unresolved,
        },
        BinState::Starved => BinOutcome {
            bin,
            finish_level: None,
            p_fin: None,
            pi_hat: 0.0,
            status: BinStatus::Starved,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_state::{make_beta_points, make_constant, make_piecewise_linear};

    #[test]
    fn single_bin_always_fail() {
        let ls = make_constant("f", 2, -1.0).unwrap();
        let part = Partition::single_bin(2).unwrap();
        let r = run_dss(
            &ls,
            &part,
            &DssConfig::new(100),
            &mut RandomStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(r.pf_hat, 1.0);
        assert_eq!(r.levels, 1);
        assert_eq!(r.status, RunStatus::Converged);
    }

    #[test]
    fn never_fail_hits_level_budget() {
        let ls = make_constant("o", 2, 1.0).unwrap();
        let part = Partition::halfspace(1, 2).unwrap();
        let cfg = DssConfig {
            max_levels: 5,
            ..DssConfig::new(50)
        };
        let r = run_dss(&ls, &part, &cfg, &mut RandomStream::new(0, 0)).unwrap();
        assert_eq!(r.status, RunStatus::MaxLevels);
        assert_eq!(r.pf_hat, 0.0);
        assert_eq!(r.levels, 5);
        assert!(r
            .bin_outcomes
            .iter()
            .all(|b| b.status == BinStatus::Unresolved));
    }

    #[test]
    fn dimension_mismatch() {
        let ls = make_piecewise_linear();
        let part = Partition::orthants(3).unwrap();
        let err = run_dss(
            &ls,
            &part,
            &DssConfig::new(100),
            &mut RandomStream::new(0, 0),
        );
        assert!(matches!(
            err,
            Err(RunError::Config(ConfigError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn beta_points_quadrants_all_finish() {
        let ls = make_beta_points();
        let part = Partition::orthants(2).unwrap();
        let r = run_dss(
            &ls,
            &part,
            &DssConfig::new(1000),
            &mut RandomStream::new(8, 0),
        )
        .unwrap();
        assert_eq!(r.status, RunStatus::Converged);
        assert!(r.unresolved_bound <= 0.001 * r.pf_hat);
        let s: f64 = r.pi_hats().iter().sum();
        assert!((s - r.pf_hat).abs() <= 1e-12);
        assert!(r
            .bin_outcomes
            .iter()
            .all(|b| b.status == BinStatus::Finished && b.pi_hat > 0.0));
    }

    #[test]
    fn starvation_warning() {
        assert_eq!(starvation_risk(100, &Partition::orthants(2).unwrap()), None);
        assert_eq!(
            starvation_risk(30, &Partition::orthants(2).unwrap()),
            Some(7.5)
        );
    }

    #[test]
    fn starved_bin_is_dropped() {
        // A bin of probability ~1e-5 almost never receives a particle: the
        // sector around angle 0 with half-width 3e-5 rad.
        let ls = make_beta_points();
        let w = 3e-5;
        let part = Partition::angular_sectors_2d(&[-w, w]).unwrap();
        let r = run_dss(
            &ls,
            &part,
            &DssConfig::new(200),
            &mut RandomStream::new(1, 0),
        )
        .unwrap();
        assert_eq!(r.bin_outcomes[0].status, BinStatus::Starved);
        assert!(r.unresolved_bound > 0.0);
        assert_eq!(r.bin_outcomes[1].status, BinStatus::Finished);
    }
}
