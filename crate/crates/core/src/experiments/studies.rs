//! Study configurations, rows and runners.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{num, opt, CsvRow};
use super::{
    check_budget, check_grid, covering_trials, estimate_cost, mean_ci, rescale_factor, study_probe, DEFAULT_PROBE_ETA,
};
use crate::covering::{covering_interval, covering_radius_window, WindowSide, WindowSpec};
use crate::error::{invalid, Result};
use crate::sampler::{sample, SeedSpec};
use crate::spaces::{limit_constant, typical_covering_scale, DomainModel};

fn default_p() -> f64 {
    1.0
}

fn default_eta() -> f64 {
    DEFAULT_PROBE_ETA
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return invalid(format!("trials must be at least {min}, got {trials}"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta > 0.0) {
        return invalid(format!("probe_eta must be positive, got {eta}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub domain: DomainModel,
    #[serde(default = "default_p")]
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_eta")]
    pub probe_eta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(domain: DomainModel, n_grid: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        StudyConfig { domain, p: 1.0, n_grid, trials, probe_eta: DEFAULT_PROBE_ETA, master_seed, output: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.clone().validated()?;
        if !(self.p.is_finite() && self.p >= 1.0) {
            return invalid(format!("p must be at least 1, got {}", self.p));
        }
        check_grid(&self.n_grid, 2)?;
        check_trials(self.trials, 2)?;
        check_eta(self.probe_eta)
    }

    pub fn estimated_cost(&self) -> f64 {
        estimate_cost(&self.domain, &self.n_grid, self.trials, self.probe_eta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub trials: usize,
    pub mean_rho_p_lower: f64,
    pub mean_rho_p_upper: f64,
    /// 99% half-width of the midpoint mean.
    pub ci_half_width: f64,
    /// Mean of `(U^p - L^p) / 2`.
    pub systematic_half_width: f64,
    pub rescaled: f64,
    pub rescaled_ci_half_width: f64,
    pub target: Option<f64>,
}

impl StudyRow {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.mean_rho_p_lower + self.mean_rho_p_upper)
    }
}

impl CsvRow for StudyRow {
    const HEADER: &'static [&'static str] = &[
        "N",
        "T",
        "mean_rho_p_lower",
        "mean_rho_p_upper",
        "ci_half_width",
        "systematic_half_width",
        "rescaled",
        "rescaled_ci_half_width",
        "target",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trials.to_string(),
            num(self.mean_rho_p_lower),
            num(self.mean_rho_p_upper),
            num(self.ci_half_width),
            num(self.systematic_half_width),
            num(self.rescaled),
            num(self.rescaled_ci_half_width),
            opt(self.target),
        ]
    }
}

/// Row from per-trial `(L^p, U^p)` pairs.
fn study_row(n: usize, pairs: &[(f64, f64)], factor: f64, target: Option<f64>) -> StudyRow {
    let lower: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let upper: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mid: Vec<f64> = pairs.iter().map(|p| 0.5 * (p.0 + p.1)).collect();
    let half: Vec<f64> = pairs.iter().map(|p| 0.5 * (p.1 - p.0)).collect();
    let m = mean_ci(&mid);
    StudyRow {
        n,
        trials: pairs.len(),
        mean_rho_p_lower: mean_ci(&lower).mean,
        mean_rho_p_upper: mean_ci(&upper).mean,
        ci_half_width: m.ci_half_width,
        systematic_half_width: mean_ci(&half).mean,
        rescaled: m.mean * factor,
        rescaled_ci_half_width: m.ci_half_width * factor,
        target: target.filter(|t| t.is_finite()),
    }
}

/// `E[ρ^p]` per `N`, bracketed by the sandwich bounds and rescaled by
/// `(N / log N)^{p/s}`. Each row is passed to `on_row` as soon as it is
/// complete.
pub fn run_expectation_study(
    config: &StudyConfig,
    force: bool,
    mut on_row: impl FnMut(&StudyRow) -> Result<()>,
) -> Result<Vec<StudyRow>> {
    config.validate()?;
    check_budget(config.estimated_cost(), force)?;
    let domain = &config.domain;
    let s = domain.intrinsic_dim();
    let target = limit_constant(domain, config.p).ok();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let probe = study_probe(domain, n, config.probe_eta)?;
        let bounds = covering_trials(domain, n, config.trials, config.master_seed, probe.as_ref())?;
        let pairs: Vec<(f64, f64)> = bounds.iter().map(|b| (b.lower.powf(config.p), b.upper.powf(config.p))).collect();
        let row = study_row(n, &pairs, rescale_factor(n, config.p, s), target);
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub domain: DomainModel,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub thresholds: Vec<f64>,
    #[serde(default = "default_eta")]
    pub probe_eta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl TailConfig {
    pub fn validate(&self) -> Result<()> {
        self.domain.clone().validated()?;
        if self.n < 2 {
            return invalid("N must be at least 2");
        }
        check_trials(self.trials, 1)?;
        check_eta(self.probe_eta)?;
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return invalid("thresholds must be a nonempty list of finite nonnegative values");
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("thresholds must be strictly increasing");
        }
        Ok(())
    }

    pub fn estimated_cost(&self) -> f64 {
        estimate_cost(&self.domain, &[self.n], self.trials, self.probe_eta)
    }
}

/// Which side of the covering scale a tail threshold probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBound {
    /// At or above the typical scale: the tail decays polynomially in `N`.
    UpperTailDecay,
    /// Below the typical scale: the probability tends to one.
    LowerTailNearOne,
}

impl TailBound {
    pub fn as_str(self) -> &'static str {
        match self {
            TailBound::UpperTailDecay => "upper_tail_decay",
            TailBound::LowerTailNearOne => "lower_tail_near_one",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub threshold: f64,
    /// Fraction of trials with `L ≥ t`; at most `P(ρ ≥ t)`.
    pub empirical_prob_lower: f64,
    /// Fraction of trials with `U ≥ t`; at least `P(ρ ≥ t)`.
    pub empirical_prob_upper: f64,
    pub bound_form: TailBound,
}

impl CsvRow for TailRow {
    const HEADER: &'static [&'static str] =
        &["N", "threshold", "empirical_prob_lower", "empirical_prob_upper", "bound_form"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.threshold),
            num(self.empirical_prob_lower),
            num(self.empirical_prob_upper),
            self.bound_form.as_str().to_string(),
        ]
    }
}

/// Empirical tail probabilities `P(ρ ≥ t)`, bracketed by the bounds.
pub fn run_tail_study(config: &TailConfig, force: bool) -> Result<Vec<TailRow>> {
    config.validate()?;
    check_budget(config.estimated_cost(), force)?;
    let probe = study_probe(&config.domain, config.n, config.probe_eta)?;
    let bounds = covering_trials(&config.domain, config.n, config.trials, config.master_seed, probe.as_ref())?;
    let scale = typical_covering_scale(&config.domain, config.n);
    let t_count = bounds.len() as f64;
    Ok(config
        .thresholds
        .iter()
        .map(|&t| TailRow {
            n: config.n,
            threshold: t,
            empirical_prob_lower: bounds.iter().filter(|b| b.lower >= t).count() as f64 / t_count,
            empirical_prob_upper: bounds.iter().filter(|b| b.upper >= t).count() as f64 / t_count,
            bound_form: if t >= scale { TailBound::UpperTailDecay } else { TailBound::LowerTailNearOne },
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZnConfig {
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_eta")]
    pub probe_eta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ZnConfig {
    pub fn domain(&self) -> Result<DomainModel> {
        DomainModel::sphere(self.d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.d) {
            return invalid(format!("the Z_N study supports d = 1 or 2, got {}", self.d));
        }
        check_grid(&self.n_grid, 2)?;
        check_trials(self.trials, 2)?;
        check_eta(self.probe_eta)
    }

    pub fn estimated_cost(&self) -> Result<f64> {
        Ok(estimate_cost(&self.domain()?, &self.n_grid, self.trials, self.probe_eta))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZnRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub trials: usize,
    pub mean: f64,
    pub stdev: f64,
    pub frac_within_0_1: f64,
    pub frac_within_0_2: f64,
}

impl CsvRow for ZnRow {
    const HEADER: &'static [&'static str] = &["N", "T", "mean", "stdev", "frac_within_0_1", "frac_within_0_2"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trials.to_string(),
            num(self.mean),
            num(self.stdev),
            num(self.frac_within_0_1),
            num(self.frac_within_0_2),
        ]
    }
}

/// `Z_N = ρ (N / log N)^{1/d} / c_d` on the sphere, where `c_d` is the
/// limit constant; computed from covering midpoints.
pub fn run_zn_study(config: &ZnConfig, force: bool, mut on_row: impl FnMut(&ZnRow) -> Result<()>) -> Result<Vec<ZnRow>> {
    config.validate()?;
    check_budget(config.estimated_cost()?, force)?;
    let domain = config.domain()?;
    let base = limit_constant(&domain, 1.0)?;
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let probe = study_probe(&domain, n, config.probe_eta)?;
        let bounds = covering_trials(&domain, n, config.trials, config.master_seed, probe.as_ref())?;
        let factor = rescale_factor(n, 1.0, config.d as f64) / base;
        let z: Vec<f64> = bounds.iter().map(|b| b.midpoint() * factor).collect();
        let within = |eps: f64| z.iter().filter(|v| (*v - 1.0).abs() <= eps).count() as f64 / z.len() as f64;
        let stats = mean_ci(&z);
        let row = ZnRow {
            n,
            trials: z.len(),
            mean: stats.mean,
            stdev: stats.stdev,
            frac_within_0_1: within(0.1),
            frac_within_0_2: within(0.2),
        };
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcsineConfig {
    pub a_exponent: f64,
    pub side: WindowSide,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ArcsineConfig {
    pub fn window(&self) -> Result<WindowSpec> {
        WindowSpec::new(self.a_exponent, self.side)
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        arcsine_rate(self.a_exponent, self.side, 2)?;
        check_grid(&self.n_grid, 2)?;
        check_trials(self.trials, 2)
    }

    pub fn estimated_cost(&self) -> f64 {
        estimate_cost(&DomainModel::arcsine(), &self.n_grid, self.trials, 1.0)
    }
}

/// Factor that makes the expected window radius of order one: `N²` for
/// the right edge with `a = 2`, `N^{1+a/2} / log N` for the right edge with
/// `0 < a < 2`, `N / log N` in the interior.
pub fn arcsine_rate(a: f64, side: WindowSide, n: usize) -> Result<f64> {
    let nf = n as f64;
    match side {
        WindowSide::Interior => Ok(nf / nf.ln()),
        WindowSide::RightEdge if a == 2.0 => Ok(nf * nf),
        WindowSide::RightEdge if a > 0.0 && a < 2.0 => Ok(nf.powf(1.0 + a / 2.0) / nf.ln()),
        WindowSide::RightEdge => invalid(format!("no rate is known for a right-edge window with a = {a}")),
    }
}

/// Window covering radii of arcsine samples, rescaled by [`arcsine_rate`].
/// Rows carry no target.
pub fn run_arcsine_study(
    config: &ArcsineConfig,
    force: bool,
    mut on_row: impl FnMut(&StudyRow) -> Result<()>,
) -> Result<Vec<StudyRow>> {
    config.validate()?;
    check_budget(config.estimated_cost(), force)?;
    let domain = DomainModel::arcsine();
    let window = config.window()?;
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let radii: Vec<f64> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let s = sample(&domain, n, SeedSpec::new(config.master_seed, t as u64))?;
                covering_radius_window(&s.points, window, n)
            })
            .collect::<Result<_>>()?;
        let pairs: Vec<(f64, f64)> = radii.iter().map(|&r| (r, r)).collect();
        let row = study_row(n, &pairs, arcsine_rate(config.a_exponent, config.side, n)?, None);
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VersusConfig {
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_eta")]
    pub probe_eta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl VersusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return invalid(format!("the comparison supports cube dimension 1, 2 or 3, got {}", self.d));
        }
        check_grid(&self.n_grid, 2)?;
        check_trials(self.trials, 2)?;
        check_eta(self.probe_eta)
    }

    pub fn estimated_cost(&self) -> Result<f64> {
        Ok(estimate_cost(&DomainModel::cube(self.d)?, &self.n_grid, self.trials, self.probe_eta))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VersusRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub trials: usize,
    pub random_mean: f64,
    pub random_ci_half_width: f64,
    pub grid_side: usize,
    pub grid_rho: f64,
    pub ratio: f64,
}

impl CsvRow for VersusRow {
    const HEADER: &'static [&'static str] =
        &["N", "T", "random_mean", "random_ci_half_width", "grid_side", "grid_rho", "ratio"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trials.to_string(),
            num(self.random_mean),
            num(self.random_ci_half_width),
            self.grid_side.to_string(),
            num(self.grid_rho),
            num(self.ratio),
        ]
    }
}

/// Largest `k` with `k^d ≤ n`.
pub fn grid_side(n: usize, d: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / d as f64).round() as usize;
    while k > 0 && k.checked_pow(d as u32).is_none_or(|v| v > n) {
        k -= 1;
    }
    while (k + 1).checked_pow(d as u32).is_some_and(|v| v <= n) {
        k += 1;
    }
    k
}

/// Centres of the `k^d` congruent subcubes of `[0,1]^d`.
pub fn centered_grid(k: usize, d: usize) -> crate::point::PointSet {
    let mut out = crate::point::PointSet::with_capacity(d, k.pow(d as u32));
    let mut idx = vec![0usize; d];
    let mut p = vec![0.0; d];
    loop {
        for (c, &i) in p.iter_mut().zip(&idx) {
            *c = (i as f64 + 0.5) / k as f64;
        }
        out.push(&p);
        let mut a = 0;
        loop {
            if a == d {
                return out;
            }
            idx[a] += 1;
            if idx[a] < k {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Covering radius of the centred grid of side `k` in `[0,1]^d`:
/// half the subcube diagonal.
pub fn centered_grid_radius(k: usize, d: usize) -> f64 {
    (d as f64).sqrt() / (2.0 * k as f64)
}

/// Mean random covering radius against the centred `⌊N^{1/d}⌋^d` grid.
pub fn run_random_vs_structured(
    config: &VersusConfig,
    force: bool,
    mut on_row: impl FnMut(&VersusRow) -> Result<()>,
) -> Result<Vec<VersusRow>> {
    config.validate()?;
    check_budget(config.estimated_cost()?, force)?;
    let domain = DomainModel::cube(config.d)?;
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let probe = study_probe(&domain, n, config.probe_eta)?;
        let bounds = covering_trials(&domain, n, config.trials, config.master_seed, probe.as_ref())?;
        let mids: Vec<f64> = bounds.iter().map(|b| b.midpoint()).collect();
        let stats = mean_ci(&mids);
        let k = grid_side(n, config.d);
        let grid_rho = centered_grid_radius(k, config.d);
        let row = VersusRow {
            n,
            trials: mids.len(),
            random_mean: stats.mean,
            random_ci_half_width: stats.ci_half_width,
            grid_side: k,
            grid_rho,
            ratio: stats.mean / grid_rho,
        };
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsNetConfig {
    pub domain: DomainModel,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub c_mult: f64,
    #[serde(default = "default_eta")]
    pub probe_eta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl EpsNetConfig {
    pub fn validate(&self) -> Result<()> {
        self.domain.clone().validated()?;
        if !(self.c_mult.is_finite() && self.c_mult > 0.0) {
            return invalid(format!("c_mult must be positive, got {}", self.c_mult));
        }
        check_grid(&self.n_grid, 2)?;
        check_trials(self.trials, 1)?;
        check_eta(self.probe_eta)
    }

    pub fn estimated_cost(&self) -> f64 {
        estimate_cost(&self.domain, &self.n_grid, self.trials, self.probe_eta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsNetRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub trials: usize,
    pub eps: f64,
    pub yes_fraction: f64,
    pub yes_or_unknown_fraction: f64,
}

impl CsvRow for EpsNetRow {
    const HEADER: &'static [&'static str] = &["N", "T", "eps", "yes_fraction", "yes_or_unknown_fraction"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trials.to_string(),
            num(self.eps),
            num(self.yes_fraction),
            num(self.yes_or_unknown_fraction),
        ]
    }
}

/// Fraction of samples that are `ε`-nets for
/// `ε = c_mult (H_s/υ_s · log N / N)^{1/s}`. On domains with an exact
/// covering radius no verdict is unknown.
pub fn run_epsnet_study(
    config: &EpsNetConfig,
    force: bool,
    mut on_row: impl FnMut(&EpsNetRow) -> Result<()>,
) -> Result<Vec<EpsNetRow>> {
    config.validate()?;
    check_budget(config.estimated_cost(), force)?;
    let domain = &config.domain;
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let eps = config.c_mult * typical_covering_scale(domain, n);
        let probe = study_probe(domain, n, config.probe_eta)?;
        let verdicts: Vec<(bool, bool)> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let s = sample(domain, n, SeedSpec::new(config.master_seed, t as u64))?;
                let b = covering_interval(domain, &s.points, probe.as_ref())?;
                Ok((b.upper <= eps, b.lower <= eps))
            })
            .collect::<Result<_>>()?;
        let t_count = verdicts.len() as f64;
        let row = EpsNetRow {
            n,
            trials: verdicts.len(),
            eps,
            yes_fraction: verdicts.iter().filter(|v| v.0).count() as f64 / t_count,
            yes_or_unknown_fraction: verdicts.iter().filter(|v| v.1).count() as f64 / t_count,
        };
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::covering_radius_bounds;
    use crate::nets::build_probe_net;

    fn no_sink<R>(_: &R) -> Result<()> {
        Ok(())
    }

    #[test]
    fn config_validation() {
        let ok = StudyConfig::new(DomainModel::interval(), vec![10, 20], 2, 0);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.n_grid = vec![20, 10];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.trials = 1;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.p = 0.5;
        assert!(c.validate().is_err());
        let mut c = ok;
        c.probe_eta = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let c: StudyConfig = serde_json::from_str(
            r#"{"domain":{"kind":"sphere","params":{"d":2}},"n_grid":[100,1000],"trials":10}"#,
        )
        .unwrap();
        assert_eq!(c.p, 1.0);
        assert_eq!(c.probe_eta, DEFAULT_PROBE_ETA);
        assert_eq!(c.master_seed, 0);
    }

    #[test]
    fn rows_are_ordered_and_sandwiched() {
        let mut c = StudyConfig::new(DomainModel::cube(2).unwrap(), vec![50, 200], 8, 3);
        c.probe_eta = 0.2;
        let mut streamed = Vec::new();
        let rows = run_expectation_study(&c, false, |r| {
            streamed.push(r.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(rows, streamed);
        for r in &rows {
            assert!(r.mean_rho_p_lower <= r.mean_rho_p_upper);
            assert!(r.ci_half_width >= 0.0 && r.systematic_half_width > 0.0);
            assert!((r.target.unwrap() - 0.5641895835477563).abs() < 1e-12);
        }
    }

    #[test]
    fn cantor_rows_have_no_target() {
        let c = StudyConfig::new(DomainModel::cantor(30).unwrap(), vec![20], 3, 1);
        let rows = run_expectation_study(&c, false, no_sink).unwrap();
        assert_eq!(rows[0].target, None);
        assert!(to_csv_line(&rows[0]).ends_with(','));
    }

    fn to_csv_line<R: CsvRow>(r: &R) -> String {
        r.fields().join(",")
    }

    #[test]
    fn study_is_deterministic() {
        let c = StudyConfig::new(DomainModel::sphere(2).unwrap(), vec![100, 300], 4, 9);
        let a = run_expectation_study(&c, false, no_sink).unwrap();
        let b = run_expectation_study(&c, false, no_sink).unwrap();
        assert_eq!(super::super::to_csv(&a), super::super::to_csv(&b));
    }

    #[test]
    fn p_power_applies_per_trial() {
        let mut c = StudyConfig::new(DomainModel::interval(), vec![100], 5, 4);
        let r1 = run_expectation_study(&c, false, no_sink).unwrap();
        c.p = 2.0;
        let r2 = run_expectation_study(&c, false, no_sink).unwrap();
        let bounds = covering_trials(&DomainModel::interval(), 100, 5, 4, None).unwrap();
        let m2 = bounds.iter().map(|b| b.lower * b.lower).sum::<f64>() / 5.0;
        assert!((r2[0].mean_rho_p_lower - m2).abs() < 1e-15);
        assert!(r2[0].mean_rho_p_lower >= r1[0].mean_rho_p_lower.powi(2));
    }

    #[test]
    fn tail_trivial_thresholds() {
        let c = TailConfig {
            domain: DomainModel::interval(),
            n: 50,
            trials: 20,
            thresholds: vec![0.0, 0.5, 2.0],
            probe_eta: DEFAULT_PROBE_ETA,
            master_seed: 2,
            output: None,
        };
        let rows = run_tail_study(&c, false).unwrap();
        assert_eq!(rows[0].empirical_prob_lower, 1.0);
        assert_eq!(rows[0].bound_form, TailBound::LowerTailNearOne);
        assert_eq!(rows[2].empirical_prob_upper, 0.0);
        for r in &rows {
            assert!(r.empirical_prob_lower <= r.empirical_prob_upper);
        }
        let mut bad = c;
        bad.thresholds = vec![0.5, 0.1];
        assert!(run_tail_study(&bad, false).is_err());
    }

    #[test]
    fn tail_brackets_on_the_square() {
        let c = TailConfig {
            domain: DomainModel::cube(2).unwrap(),
            n: 100,
            trials: 10,
            thresholds: vec![0.0, 0.1, 5.0],
            probe_eta: 0.2,
            master_seed: 2,
            output: None,
        };
        let rows = run_tail_study(&c, false).unwrap();
        assert_eq!(rows[0].empirical_prob_lower, 1.0);
        assert_eq!(rows[2].empirical_prob_upper, 0.0);
    }

    #[test]
    fn zn_schema_with_two_trials() {
        for d in [1, 2] {
            let c = ZnConfig { d, n_grid: vec![100], trials: 2, probe_eta: 0.2, master_seed: 0, output: None };
            let rows = run_zn_study(&c, false, no_sink).unwrap();
            let r = &rows[0];
            assert_eq!(r.trials, 2);
            assert!((0.0..=1.0).contains(&r.frac_within_0_1));
            assert!(r.frac_within_0_1 <= r.frac_within_0_2 && r.frac_within_0_2 <= 1.0);
        }
        let c = ZnConfig { d: 3, n_grid: vec![100], trials: 2, probe_eta: 0.2, master_seed: 0, output: None };
        assert!(run_zn_study(&c, false, no_sink).is_err());
    }

    #[test]
    fn zn_matches_circle_scale() {
        // on the circle Z_N = ρ N / (π log N)
        let c = ZnConfig { d: 1, n_grid: vec![1000], trials: 3, probe_eta: 0.1, master_seed: 5, output: None };
        let rows = run_zn_study(&c, false, no_sink).unwrap();
        let bounds = covering_trials(&DomainModel::sphere(1).unwrap(), 1000, 3, 5, None).unwrap();
        let z: Vec<f64> = bounds.iter().map(|b| b.lower * 1000.0 / (std::f64::consts::PI * 1000f64.ln())).collect();
        assert!((rows[0].mean - z.iter().sum::<f64>() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_rates() {
        assert_eq!(arcsine_rate(2.0, WindowSide::RightEdge, 10).unwrap(), 100.0);
        let r = arcsine_rate(1.0, WindowSide::RightEdge, 100).unwrap();
        assert!((r - 1000.0 / 100f64.ln()).abs() < 1e-9);
        let r = arcsine_rate(0.5, WindowSide::Interior, 100).unwrap();
        assert!((r - 100.0 / 100f64.ln()).abs() < 1e-12);
        assert!(arcsine_rate(3.0, WindowSide::RightEdge, 100).is_err());
    }

    #[test]
    fn arcsine_study_rows() {
        let c = ArcsineConfig {
            a_exponent: 1.0,
            side: WindowSide::Interior,
            n_grid: vec![100, 400],
            trials: 4,
            master_seed: 1,
            output: None,
        };
        let rows = run_arcsine_study(&c, false, no_sink).unwrap();
        for r in &rows {
            assert_eq!(r.mean_rho_p_lower, r.mean_rho_p_upper);
            assert_eq!(r.systematic_half_width, 0.0);
            assert_eq!(r.target, None);
        }
    }

    #[test]
    fn grid_side_and_radius() {
        assert_eq!(grid_side(100, 1), 100);
        assert_eq!(grid_side(100, 2), 10);
        assert_eq!(grid_side(99, 2), 9);
        assert_eq!(grid_side(1000, 3), 10);
        assert_eq!(grid_side(999, 3), 9);
        assert_eq!(centered_grid_radius(100, 1), 1.0 / 200.0);
        assert!((centered_grid_radius(10, 2) - 2f64.sqrt() / 20.0).abs() < 1e-16);
    }

    #[test]
    fn centered_grid_radius_matches_bounds() {
        for (k, d) in [(7usize, 1usize), (5, 2), (3, 3)] {
            let cube = DomainModel::cube(d).unwrap();
            let grid = centered_grid(k, d);
            assert_eq!(grid.len(), k.pow(d as u32));
            let net = build_probe_net(&cube, 0.01).unwrap();
            let b = covering_radius_bounds(&cube, &grid, &net).unwrap();
            let rho = centered_grid_radius(k, d);
            assert!(b.lower <= rho + 1e-12 && rho <= b.upper + 1e-12, "{k} {d}");
        }
    }

    #[test]
    fn versus_d1_ratio_above_one() {
        let c = VersusConfig { d: 1, n_grid: vec![100], trials: 20, probe_eta: 0.05, master_seed: 3, output: None };
        let rows = run_random_vs_structured(&c, false, no_sink).unwrap();
        assert_eq!(rows[0].grid_rho, 0.005);
        assert!(rows[0].ratio > 1.0);
    }

    #[test]
    fn epsnet_single_trial_is_binary() {
        let c = EpsNetConfig {
            domain: DomainModel::cube(2).unwrap(),
            n_grid: vec![200],
            trials: 1,
            c_mult: 1.0,
            probe_eta: 0.1,
            master_seed: 0,
            output: None,
        };
        let rows = run_epsnet_study(&c, false, no_sink).unwrap();
        assert!([0.0, 1.0].contains(&rows[0].yes_fraction));
        assert!([0.0, 1.0].contains(&rows[0].yes_or_unknown_fraction));
        assert!(rows[0].yes_fraction <= rows[0].yes_or_unknown_fraction);
    }

    #[test]
    fn budget_refused_before_running() {
        let c = StudyConfig::new(DomainModel::cube(3).unwrap(), vec![1_000_000], 1000, 0);
        match run_expectation_study(&c, false, no_sink) {
            Err(crate::Error::BudgetRefused { estimated, .. }) => assert!(estimated > 1e10),
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}
