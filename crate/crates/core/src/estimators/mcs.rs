use super::{BinOutcome, BinStatus, LevelRecord, RunResult, RunStatus};
use crate::error::{ConfigError, RunError};
use crate::limit_state::{EvalCounter, LimitState};
use crate::partition::BinIndex;
use crate::rng::{Point, RandomStream};

/// Brute-force Monte Carlo: the fraction of `n` i.i.d. standard normal
/// draws with `g ≤ 0`.
pub fn run_mcs(ls: &LimitState, n: u64, stream: &mut RandomStream) -> Result<RunResult, RunError> {
    if n == 0 {
        return Err(ConfigError::invalid("n", "sample count must be at least 1").into());
    }
    let mut ctr = EvalCounter::new();
    let mut point = Point::new(vec![0.0; ls.dim()]);
    let mut hits = 0u64;
    for _ in 0..n {
        for x in point.coords_mut() {
            *x = stream.normal();
        }
        if ls.evaluate_unchecked(&point, &mut ctr) <= 0.0 {
            hits += 1;
        }
    }
    let pf_hat = hits as f64 / n as f64;
    Ok(RunResult {
        pf_hat,
        bin_outcomes: vec![BinOutcome {
            bin: BinIndex::new(0),
            finish_level: Some(0),
            p_fin: Some(pf_hat),
            pi_hat: pf_hat,
            status: BinStatus::Finished,
        }],
        levels: 1,
        n_evals: ctr.count(),
        unresolved_bound: 0.0,
        status: RunStatus::Converged,
        trace: vec![LevelRecord {
            level: 0,
            thresholds: vec![0.0],
            counts: vec![n as usize],
            seeds: None,
            finished_mass: pf_hat,
            unresolved_bound: 0.0,
        }],
        failure_samples: Vec::new(),
    })
}

/// Binomial standard error of a Monte Carlo estimate.
pub fn binomial_std_error(pf: f64, n: u64) -> f64 {
    (pf * (1.0 - pf) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_state::make_constant;

    #[test]
    fn constant_problems() {
        let mut s = RandomStream::new(0, 0);
        let fail = make_constant("f", 2, -1.0).unwrap();
        let ok = make_constant("o", 2, 1.0).unwrap();
        let r = run_mcs(&fail, 1000, &mut s).unwrap();
        assert_eq!(r.pf_hat, 1.0);
        assert_eq!(r.n_evals, 1000);
        assert_eq!(run_mcs(&ok, 1000, &mut s).unwrap().pf_hat, 0.0);
        assert_eq!(binomial_std_error(0.0, 10), 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        let mut s = RandomStream::new(0, 0);
        let ls = make_constant("f", 1, -1.0).unwrap();
        assert!(run_mcs(&ls, 0, &mut s).is_err());
    }
}
