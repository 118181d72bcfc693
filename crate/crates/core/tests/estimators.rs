mod common;

use common::*;
use rayon::prelude::*;
use subsim::estimators::SsConfig;
use subsim::limit_state::{make_beta_points, make_constant, make_piecewise_linear};
use subsim::{run_dss, run_mcs, run_ss, DssConfig, LimitState, Partition, RandomStream};

fn partitions() -> Vec<(&'static str, LimitState, Partition)> {
    let pl = make_piecewise_linear();
    let bp = make_beta_points();
    vec![
        ("pl single", pl.clone(), Partition::single_bin(2).unwrap()),
        (
            "pl case1",
            pl.clone(),
            Partition::angular_sectors_2d(&CASE1_CUTS).unwrap(),
        ),
        ("pl case2", pl.clone(), Partition::halfspace(2, 2).unwrap()),
        ("pl case3", pl, Partition::halfspace(1, 2).unwrap()),
        (
            "bp quadrants",
            bp.clone(),
            Partition::angular_sectors_2d(&QUADRANT_CUTS).unwrap(),
        ),
        ("bp orthants", bp.clone(), Partition::orthants(2).unwrap()),
        (
            "bp octants",
            bp,
            Partition::angular_sectors_2d(
                &(-3..=4)
                    .map(|k| k as f64 * std::f64::consts::PI / 4.0)
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        ),
    ]
}

#[test]
fn dss_structural_invariants() {
    for (name, ls, part) in partitions() {
        for (seed, n) in [(1, 200), (2, 500), (3, 1000)] {
            if let Err(e) = check_dss_invariants(&ls, &part, &DssConfig::new(n), seed) {
                panic!("{name}, seed {seed}, n {n}: {e}");
            }
        }
    }
}

#[test]
fn dss_invariants_with_odd_parameters() {
    let ls = make_piecewise_linear();
    let part = Partition::angular_sectors_2d(&CASE1_CUTS).unwrap();
    for (rho, corr, n) in [(0.1, 0.5, 333), (0.3, 0.9, 257), (0.25, 0.2, 101)] {
        let cfg = DssConfig {
            rho,
            mcmc: subsim::McmcConfig::new(corr).unwrap(),
            ..DssConfig::new(n)
        };
        check_dss_invariants(&ls, &part, &cfg, 11).unwrap();
    }
}

#[test]
fn ss_structural_invariants() {
    for ls in [make_piecewise_linear(), make_beta_points()] {
        for seed in 0..5 {
            check_ss_invariants(&ls, &SsConfig::new(300 + 100 * seed as usize), seed).unwrap();
        }
    }
}

#[test]
fn degenerate_problems() {
    let fail = make_constant("always_fail", 2, -1.0).unwrap();
    let part = Partition::single_bin(2).unwrap();
    let r = run_dss(
        &fail,
        &part,
        &DssConfig::new(100),
        &mut RandomStream::new(0, 0),
    )
    .unwrap();
    assert_eq!((r.pf_hat, r.levels), (1.0, 1));
    let r = run_ss(&fail, &SsConfig::new(100), &mut RandomStream::new(0, 0)).unwrap();
    assert_eq!((r.pf_hat, r.levels), (1.0, 1));
    let ok = make_constant("never_fail", 2, 1.0).unwrap();
    assert_eq!(
        run_mcs(&ok, 100, &mut RandomStream::new(0, 0))
            .unwrap()
            .pf_hat,
        0.0
    );
}

#[test]
fn runs_are_reproducible() {
    let ls = make_beta_points();
    let part = Partition::orthants(2).unwrap();
    let a = dss_once(&ls, &part, 400, 7, 3);
    let b = dss_once(&ls, &part, 400, 7, 3);
    assert_eq!(a, b);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.failure_samples, b.failure_samples);
    assert_ne!(a, dss_once(&ls, &part, 400, 7, 4));
}

#[test]
fn mcs_is_unbiased() {
    // g = 2 − θ1: P_F = Φ(−2).
    let beta = 2.0;
    let ls = LimitState::new("linear", 2, move |x| beta - x[0]).unwrap();
    let pf = phi(-beta);
    let reps = 10_000u64;
    let n = 10_000u64;
    let total: f64 = (0..reps)
        .into_par_iter()
        .map(|i| {
            run_mcs(&ls, n, &mut RandomStream::new(77, i))
                .unwrap()
                .pf_hat
        })
        .sum();
    let mean = total / reps as f64;
    let se = (pf * (1.0 - pf) / (reps * n) as f64).sqrt();
    assert!((mean - pf).abs() < 4.0 * se, "{mean} vs {pf} (se {se})");
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[test]
fn single_bin_dss_matches_ss_in_distribution() {
    let ls = make_piecewise_linear();
    let part = Partition::single_bin(2).unwrap();
    let runs = 500u64;
    let dss: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|i| dss_once(&ls, &part, 1000, 21, i).pf_hat)
        .collect();
    let ss: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|i| {
            run_ss(&ls, &SsConfig::new(1000), &mut RandomStream::new(22, i))
                .unwrap()
                .pf_hat
        })
        .collect();
    let (md, ms) = (median(dss), median(ss));
    assert!((md - ms).abs() <= 0.25 * ms, "medians {md} vs {ms}");
}
