//! Monte Carlo pipelines checked against exact finite-N oracles.

mod common;

use std::f64::consts::{PI, TAU};

use covrad::experiments::{
    circle_arclength_trials, circle_expectation_oracle, covering_trials, mean_ci, rescale_factor,
    run_expectation_study, to_csv, StudyConfig,
};
use covrad::DomainModel;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use common::{bands, u64_at, usize_at};

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Exact `E ρ` for `n` uniform points on `[0,1]`.
///
/// With spacings `S_0, ..., S_n` uniform on the simplex,
/// `ρ = max(S_0, S_n, S_i / 2)`, and for `a` end spacings above `t` and `b`
/// interior spacings above `2t` the joint probability is
/// `(1 - (a + 2b) t)_+^n`. Inclusion–exclusion and `∫ (1 - ct)_+^n dt =
/// 1 / (c (n+1))` give an alternating finite sum.
fn interval_expectation(n: u64) -> f64 {
    let mut total = BigRational::zero();
    for a in 0..=2u64 {
        for b in 0..n {
            if a + b == 0 {
                continue;
            }
            let term = BigRational::new(binomial(2, a) * binomial(n - 1, b), BigInt::from((n + 1) * (a + 2 * b)));
            if (a + b) % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    total.to_f64().unwrap()
}

#[test]
fn interval_oracle_small_cases() {
    // one point: E max(x, 1 - x) = 3/4
    assert!((interval_expectation(1) - 0.75).abs() < 1e-15);
    // two points by direct integration over the ordered pair
    let steps = 2000;
    let h = 1.0 / steps as f64;
    let mut acc = 0.0;
    for i in 0..steps {
        for j in 0..steps {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let (lo, hi) = (x.min(y), x.max(y));
            acc += lo.max(1.0 - hi).max((hi - lo) / 2.0);
        }
    }
    assert!((interval_expectation(2) - acc * h * h).abs() < 1e-6);
}

#[test]
fn interval_study_matches_oracle() {
    let b = bands();
    let cfg = &b["interval_oracle"];
    let n = usize_at(cfg, "N");
    let c = StudyConfig::new(DomainModel::interval(), vec![n], usize_at(cfg, "trials"), u64_at(cfg, "seed"));
    let row = &run_expectation_study(&c, false, |_| Ok(())).unwrap()[0];
    let oracle = interval_expectation(n as u64) * rescale_factor(n, 1.0, 1.0);
    assert!(
        (row.rescaled - oracle).abs() <= 3.0 * row.rescaled_ci_half_width,
        "{} vs {oracle} ± {}",
        row.rescaled,
        row.rescaled_ci_half_width
    );
}

#[test]
fn circle_oracle_at_two_points() {
    let r = circle_arclength_trials(2, 1_000_000, 47).unwrap();
    let est = mean_ci(&r);
    let oracle = circle_expectation_oracle(2, TAU);
    assert!((oracle - 3.0 * TAU / 8.0).abs() < 1e-15);
    assert!((est.mean - oracle).abs() <= est.ci_half_width, "{} vs {oracle}", est.mean);
}

#[test]
fn circle_oracle_at_five_points() {
    let r = circle_arclength_trials(5, 1_000_000, 53).unwrap();
    let est = mean_ci(&r);
    let oracle = circle_expectation_oracle(5, TAU);
    assert!((est.mean - oracle).abs() <= est.ci_half_width, "{} vs {oracle}", est.mean);
}

#[test]
fn natural_log_guard() {
    // rescaling by log10 instead of ln moves the circle mean far off π H_N / N scaling
    let n = 1000usize;
    let r = circle_arclength_trials(n, 2000, 59).unwrap();
    let est = mean_ci(&r);
    let oracle = circle_expectation_oracle(n as u64, TAU);
    let natural = est.mean * rescale_factor(n, 1.0, 1.0);
    let oracle_rescaled = oracle * (n as f64 / (n as f64).ln());
    assert!((natural - oracle_rescaled).abs() <= 3.0 * est.ci_half_width * rescale_factor(n, 1.0, 1.0));
    let log10_rescaled = est.mean * n as f64 / (n as f64).log10();
    assert!((log10_rescaled - oracle_rescaled).abs() > 10.0 * est.ci_half_width * n as f64);
}

#[test]
fn circle_trend_toward_pi() {
    let b = bands();
    let cfg = &b["circle_trend"];
    let c = StudyConfig::new(
        DomainModel::sphere(1).unwrap(),
        common::grid_at(cfg, "n_grid"),
        usize_at(cfg, "trials"),
        u64_at(cfg, "seed"),
    );
    let rows = run_expectation_study(&c, false, |_| Ok(())).unwrap();
    assert!((rows[1].rescaled - PI).abs() < (rows[0].rescaled - PI).abs());
}

#[test]
fn p_power_structure_on_the_square() {
    let square = DomainModel::cube(2).unwrap();
    let mut c = StudyConfig::new(square, vec![2000], 200, 61);
    let r1 = run_expectation_study(&c, false, |_| Ok(())).unwrap()[0].clone();
    c.p = 2.0;
    let r2 = run_expectation_study(&c, false, |_| Ok(())).unwrap()[0].clone();
    // relative CI of the square is twice the relative CI of the mean
    let combined = r2.rescaled_ci_half_width + 2.0 * r1.rescaled * r1.rescaled_ci_half_width;
    let diff = (r2.rescaled - r1.rescaled * r1.rescaled).abs();
    assert!(diff <= combined, "{} vs {}² (± {combined})", r2.rescaled, r1.rescaled);
}

#[test]
fn systematic_width_scales_with_eta() {
    let domain = DomainModel::cube(2).unwrap();
    let mut c = StudyConfig::new(domain, vec![5000], 10, 67);
    c.probe_eta = 0.1;
    let wide = run_expectation_study(&c, false, |_| Ok(())).unwrap()[0].systematic_half_width;
    c.probe_eta = 0.05;
    let narrow = run_expectation_study(&c, false, |_| Ok(())).unwrap()[0].systematic_half_width;
    let ratio = wide / narrow;
    // the mesh is ceil-rounded, so the halving is not exact
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn lower_never_exceeds_upper() {
    for domain in [DomainModel::ball(3).unwrap(), DomainModel::sphere(2).unwrap(), DomainModel::cantor(30).unwrap()] {
        let c = StudyConfig::new(domain, vec![50, 500], 6, 71);
        for r in run_expectation_study(&c, false, |_| Ok(())).unwrap() {
            assert!(r.mean_rho_p_lower <= r.mean_rho_p_upper);
            assert!(r.ci_half_width >= 0.0);
        }
    }
}

#[test]
fn reruns_write_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.csv"));
        let c = StudyConfig::new(DomainModel::ball(2).unwrap(), vec![100, 1000], 5, 73);
        let mut sink = covrad::experiments::CsvSink::create::<covrad::experiments::StudyRow>(&path).unwrap();
        let rows = run_expectation_study(&c, false, |r| sink.write(r)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, to_csv(&rows));
        outputs.push(text);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn common_streams_across_sample_sizes() {
    let a = covering_trials(&DomainModel::interval(), 10, 3, 5, None).unwrap();
    let b = covering_trials(&DomainModel::interval(), 10, 5, 5, None).unwrap();
    assert_eq!(a[..], b[..3]);
}
