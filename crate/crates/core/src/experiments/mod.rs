//! Monte Carlo studies of covering radii.
//!
//! Trial `t` of every study draws its sample from stream `t` of the master
//! seed, at every `N`, so rows computed for different `N` use common random
//! streams and reruns reproduce every row exactly. Trials run in parallel
//! and are reduced in trial order.
//!
//! Rows go to CSV files with a fixed header per study; run metadata (config
//! echo, generator, library version, wall time) goes to a JSON line in
//! `<out>.meta.jsonl`, keeping the data rows free of timestamps.

mod output;
mod studies;
mod tables;

use rayon::prelude::*;

pub use output::{append_meta, meta_path, to_csv, CsvRow, CsvSink, MetaRecord};
pub use studies::*;
pub use tables::*;

use crate::covering::{circle_arclength_radius, covering_interval, CoveringRadiusInterval, Z99};
use crate::error::{Error, Result};
use crate::nets::{build_probe_net, probe_net_size, ProbeNet};
use crate::sampler::{sample, SeedSpec};
use crate::spaces::{typical_covering_scale, DomainModel};

/// Studies estimated above this many distance evaluations are refused
/// unless forced.
pub const BUDGET_LIMIT: f64 = 1e10;

/// Distance evaluations per probe point. Consecutive probes share their
/// nearest sample most of the time, so most probes cost one evaluation.
pub const PROBE_QUERY_COST: f64 = 3.0;

pub const DEFAULT_PROBE_ETA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub stdev: f64,
    /// Half-width of the 99% normal confidence interval for the mean.
    pub ci_half_width: f64,
}

/// Sample mean, sample standard deviation and 99% half-width.
pub fn mean_ci(values: &[f64]) -> MeanCi {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stdev = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MeanCi { mean, stdev, ci_half_width: Z99 * stdev / n.sqrt() }
}

pub fn harmonic_number(n: u64) -> f64 {
    // sum small terms first
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Expected arclength covering radius of `n` uniform points on a circle of
/// circumference `l`: half the expected largest spacing, `l H_n / (2n)`.
pub fn circle_expectation_oracle(n: u64, circumference: f64) -> f64 {
    circumference * harmonic_number(n) / (2.0 * n as f64)
}

/// `(N / log N)^{p/s}` with the natural logarithm.
pub fn rescale_factor(n: usize, p: f64, s: f64) -> f64 {
    let nf = n as f64;
    (nf / nf.ln()).powf(p / s)
}

/// Probe net for sample size `n`, mesh `η (H_s/υ_s · log N / N)^{1/s}`;
/// `None` on domains with an exact covering radius.
pub fn study_probe(domain: &DomainModel, n: usize, eta: f64) -> Result<Option<ProbeNet>> {
    if domain.has_exact_covering() {
        return Ok(None);
    }
    build_probe_net(domain, eta * typical_covering_scale(domain, n)).map(Some)
}

/// Estimated distance evaluations for `trials` runs at each `N`.
pub fn estimate_cost(domain: &DomainModel, n_grid: &[usize], trials: usize, eta: f64) -> f64 {
    n_grid
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let per_trial = if domain.has_exact_covering() {
                nf * nf.log2().max(1.0)
            } else {
                nf * nf.log2().max(1.0) + PROBE_QUERY_COST * probe_net_size(domain, eta * typical_covering_scale(domain, n))
            };
            trials as f64 * per_trial
        })
        .sum()
}

pub fn check_budget(estimated: f64, force: bool) -> Result<()> {
    if estimated > BUDGET_LIMIT && !force {
        Err(Error::BudgetRefused { estimated, limit: BUDGET_LIMIT })
    } else {
        Ok(())
    }
}

/// Covering intervals of trials `0..trials` at sample size `n`, in trial order.
pub fn covering_trials(
    domain: &DomainModel,
    n: usize,
    trials: usize,
    master_seed: u64,
    probe: Option<&ProbeNet>,
) -> Result<Vec<CoveringRadiusInterval>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = sample(domain, n, SeedSpec::new(master_seed, t as u64))?;
            covering_interval(domain, &s.points, probe)
        })
        .collect()
}

/// Arclength covering radii of `trials` uniform samples of size `n` on the
/// unit circle.
pub fn circle_arclength_trials(n: usize, trials: usize, master_seed: u64) -> Result<Vec<f64>> {
    let circle = DomainModel::Sphere { d: 1 };
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = sample(&circle, n, SeedSpec::new(master_seed, t as u64))?;
            circle_arclength_radius(&s.points)
        })
        .collect()
}

pub(crate) fn check_grid(n_grid: &[usize], min_n: usize) -> Result<()> {
    if n_grid.is_empty() {
        return crate::error::invalid("n_grid is empty");
    }
    if n_grid[0] < min_n {
        return crate::error::invalid(format!("n_grid values must be at least {min_n}"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return crate::error::invalid("n_grid must be strictly increasing");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_small_cases() {
        assert_eq!(circle_expectation_oracle(1, 5.0), 2.5);
        assert!((circle_expectation_oracle(2, 8.0) - 3.0).abs() < 1e-15);
        let h1000: f64 = (1..=1000).map(|k| 1.0 / k as f64).sum();
        assert!((h1000 - 7.485470860550345).abs() < 1e-12);
        let v = circle_expectation_oracle(1000, std::f64::consts::TAU);
        assert!((v - std::f64::consts::PI * h1000 / 1000.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_simulation() {
        for n in [2usize, 5] {
            let r = circle_arclength_trials(n, 200_000, 21).unwrap();
            let est = mean_ci(&r);
            let oracle = circle_expectation_oracle(n as u64, std::f64::consts::TAU);
            assert!((est.mean - oracle).abs() < est.ci_half_width, "{n}: {} vs {oracle}", est.mean);
        }
    }

    #[test]
    fn mean_ci_basic() {
        let m = mean_ci(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.stdev, 1.0);
        assert!((m.ci_half_width - Z99 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn budget_refusal() {
        assert!(check_budget(2e10, false).is_err());
        assert!(check_budget(2e10, true).is_ok());
        assert!(check_budget(1e9, false).is_ok());
        let big = estimate_cost(&DomainModel::cube(3).unwrap(), &[1_000_000], 1000, 0.01);
        assert!(big > BUDGET_LIMIT);
    }
}
