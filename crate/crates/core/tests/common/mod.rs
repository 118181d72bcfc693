//! Shared oracles and instrumented checks for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, Normal};
use subsim::estimators::{run_dss_observed, run_ss_observed, SsConfig};
use subsim::kernels::{mcmc_step, BinThresholds, Everywhere, McmcConfig, Particle};
use subsim::{
    run_dss, DssConfig, EvalCounter, LimitState, Partition, Point, RandomStream, RunStatus,
};

pub const CASE1_CUTS: [f64; 2] = [-PI + 0.8, 0.8];
pub const QUADRANT_CUTS: [f64; 4] = [-PI / 2.0, 0.0, PI / 2.0, PI];

/// Asymptotic Kolmogorov critical value at significance 0.001:
/// `sqrt(−ln(0.001/2)/2)`.
pub const KS_K_001: f64 = 1.949_466;

pub fn ks_critical_001(n: usize) -> f64 {
    KS_K_001 / (n as f64).sqrt()
}

/// Two-sided KS statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

pub fn phi(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// States of a chain on `g(θ) = θ1` in one dimension, targeting `N(0, 1)`
/// restricted to `θ1 ≤ upper` (`None`: unrestricted). `keep` states are
/// recorded, `thin` steps apart, after a burn-in of `thin` steps.
pub fn chain_1d(corr: f64, upper: Option<f64>, keep: usize, thin: usize, seed: u64) -> Vec<f64> {
    let ls = LimitState::new("identity", 1, |x| x[0]).unwrap();
    let part = Partition::single_bin(1).unwrap();
    let cfg = McmcConfig::new(corr).unwrap();
    let mut stream = RandomStream::new(seed, 0);
    let mut ctr = EvalCounter::new();
    let thresholds = [upper.unwrap_or(f64::INFINITY)];
    let active = [true];
    let region = BinThresholds {
        thresholds: &thresholds,
        active: &active,
    };
    let start = upper.map_or(0.0, |u| u.min(0.0) - 0.5);
    let mut cur = Particle {
        point: Point::new(vec![start]),
        g: start,
        bin: part.classify(&Point::new(vec![start])),
    };
    let mut out = Vec::with_capacity(keep);
    for _ in 0..thin {
        cur = mcmc_step(&cur, &region, &cfg, &mut stream, &ls, &part, &mut ctr).0;
    }
    for _ in 0..keep {
        for _ in 0..thin {
            cur = mcmc_step(&cur, &region, &cfg, &mut stream, &ls, &part, &mut ctr).0;
        }
        out.push(cur.point[0]);
    }
    out
}

/// Mean squared jump per step of an unconstrained chain in `dim` dimensions.
pub fn mean_squared_jump(corr: f64, dim: usize, steps: usize, seed: u64) -> f64 {
    let ls = LimitState::new("zero", dim, |_| 0.0).unwrap();
    let part = Partition::single_bin(dim).unwrap();
    let cfg = McmcConfig::new(corr).unwrap();
    let mut stream = RandomStream::new(seed, 0);
    let mut ctr = EvalCounter::new();
    let point = subsim::rng::sample_standard_normal(&mut stream, dim);
    let mut cur = Particle {
        bin: part.classify(&point),
        point,
        g: 0.0,
    };
    let mut total = 0.0;
    for _ in 0..steps {
        let (next, _) = mcmc_step(&cur, &Everywhere, &cfg, &mut stream, &ls, &part, &mut ctr);
        total += next
            .point
            .coords()
            .iter()
            .zip(cur.point.coords())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>();
        cur = next;
    }
    total / steps as f64
}

/// Wraps `ls` with an independent call counter.
pub fn counting(ls: &LimitState) -> (LimitState, Arc<AtomicU64>) {
    let calls = Arc::new(AtomicU64::new(0));
    let c = Arc::clone(&calls);
    let inner = ls.clone();
    let wrapped = LimitState::new(ls.name(), ls.dim(), move |x| {
        c.fetch_add(1, Ordering::Relaxed);
        inner
            .evaluate(&Point::new(x.to_vec()), &mut EvalCounter::new())
            .unwrap()
    })
    .unwrap();
    (wrapped, calls)
}

/// Runs directional subset simulation and checks every structural invariant
/// of the algorithm on the observed populations and the result.
pub fn check_dss_invariants(
    ls: &LimitState,
    part: &Partition,
    cfg: &DssConfig,
    seed: u64,
) -> Result<(), String> {
    let (ls, calls) = counting(ls);
    let mut violations = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    let mut sizes = Vec::new();
    let res = run_dss_observed(&ls, part, cfg, &mut RandomStream::new(seed, 0), |view| {
        sizes.push(view.particles.len());
        for p in view.particles {
            let j = p.bin.index();
            if part.classify(&p.point) != p.bin {
                violations.push(format!("level {}: stale bin label", view.level));
            }
            if view.level > 0 && !(view.active[j] && p.g <= view.thresholds[j]) {
                violations.push(format!(
                    "level {}: particle outside region (bin {}, g {}, gamma {})",
                    view.level, p.bin, p.g, view.thresholds[j]
                ));
            }
        }
        if let Some(prev) = &prev {
            for (a, b) in view.thresholds.iter().zip(prev) {
                if a > b {
                    violations.push(format!("level {}: threshold increased", view.level));
                }
            }
        }
        prev = Some(view.thresholds.to_vec());
    })
    .map_err(|e| format!("run failed: {e}"))?;

    if sizes.iter().any(|&s| s != cfg.n) {
        violations.push(format!("population sizes {sizes:?}"));
    }
    let sum: f64 = res.pi_hats().iter().sum();
    if (res.pf_hat - sum).abs() > 1e-12 {
        violations.push(format!("pf_hat {} vs sum {}", res.pf_hat, sum));
    }
    for (b, &p0) in res.bin_outcomes.iter().zip(part.probs()) {
        if let (Some(t), Some(p_fin)) = (b.finish_level, b.p_fin) {
            if !(p_fin > 0.0 && p_fin <= 1.0) {
                violations.push(format!("{}: p_fin {p_fin}", b.bin));
            }
            if b.pi_hat > p0 * cfg.rho.powi(t as i32) * (1.0 + 1e-12) {
                violations.push(format!("{}: pi_hat above bound", b.bin));
            }
        }
    }
    if res.status == RunStatus::Converged && res.unresolved_bound > cfg.eps_tol * res.pf_hat {
        violations.push("converged but U > eps·D".into());
    }
    let last = res.trace.last().ok_or("empty trace")?;
    if res.status == RunStatus::Converged
        && last.unresolved_bound > cfg.eps_tol * last.finished_mass
    {
        violations.push("last record violates stopping rule".into());
    }
    if res.trace[0].counts.iter().sum::<usize>() != cfg.n {
        violations.push("level-0 counts".into());
    }
    for w in res.trace.windows(2) {
        if w[0]
            .thresholds
            .iter()
            .zip(&w[1].thresholds)
            .any(|(a, b)| b > a)
        {
            violations.push("recorded thresholds increase".into());
        }
    }
    if res
        .trace
        .iter()
        .any(|r| r.counts.iter().sum::<usize>() != cfg.n)
    {
        violations.push("per-level counts do not sum to N".into());
    }
    if calls.load(std::sync::atomic::Ordering::Relaxed) != res.n_evals {
        violations.push(format!(
            "counter {} vs evaluator calls {}",
            res.n_evals,
            calls.load(std::sync::atomic::Ordering::Relaxed)
        ));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations.join("; "))
    }
}

/// Same structural checks for subset simulation.
pub fn check_ss_invariants(ls: &LimitState, cfg: &SsConfig, seed: u64) -> Result<(), String> {
    let (ls, calls) = counting(ls);
    let mut violations = Vec::new();
    let mut prev = f64::INFINITY;
    let res = run_ss_observed(&ls, cfg, &mut RandomStream::new(seed, 0), |view| {
        if view.particles.len() != cfg.n {
            violations.push(format!(
                "level {}: size {}",
                view.level,
                view.particles.len()
            ));
        }
        let gamma = view.thresholds[0];
        if gamma > prev {
            violations.push("threshold increased".into());
        }
        prev = gamma;
        if view.particles.iter().any(|p| p.g > gamma) {
            violations.push(format!("level {}: particle above threshold", view.level));
        }
    })
    .map_err(|e| format!("run failed: {e}"))?;
    if calls.load(std::sync::atomic::Ordering::Relaxed) != res.n_evals {
        violations.push("evaluation count".into());
    }
    let expected = cfg.rho.powi(res.levels as i32 - 1) * res.bin_outcomes[0].p_fin.unwrap();
    if (res.pf_hat - expected).abs() > 1e-15 {
        violations.push("estimate formula".into());
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations.join("; "))
    }
}

/// Number of quadrants holding at least one of `points`.
pub fn quadrants_covered(points: &[Point]) -> usize {
    let mut seen = [false; 4];
    for p in points {
        let k = usize::from(p[0] >= 0.0) | (usize::from(p[1] >= 0.0) << 1);
        seen[k] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

pub fn dss_once(
    ls: &LimitState,
    part: &Partition,
    n: usize,
    seed: u64,
    stream: u64,
) -> subsim::RunResult {
    run_dss(
        ls,
        part,
        &DssConfig::new(n),
        &mut RandomStream::new(seed, stream),
    )
    .unwrap()
}
