//! Covering radii, ε-net verdicts and ball measures.
//!
//! In one dimension the covering radius is computed exactly. Elsewhere a
//! probe net `P ⊂ K` of certified mesh `δ` gives the sandwich
//! `L = max_{q ∈ P} d(q, X) ≤ ρ(X, K) ≤ L + δ`: the left inequality because
//! `P ⊂ K`, the right one because every `y ∈ K` has a probe within `δ` and
//! `d(·, X)` is 1-Lipschitz.

mod exact;
mod measure;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use exact::{circle_arclength_radius, covering_radius_1d, covering_radius_window, WindowSide, WindowSpec};
pub use measure::{arcsine_cdf, ball_measure, cantor_cdf, exact_ball_measure, MIN_MC_BUDGET, Z99};

use crate::error::{invalid, Result};
use crate::nets::{ProbeNet, SpatialIndex};
use crate::point::{dist2, Point, PointSet};
use crate::sampler::SeedSpec;
use crate::spaces::{typical_covering_scale, DomainModel};

const PROBE_CHUNK: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringRadiusInterval {
    pub lower: f64,
    pub upper: f64,
    pub probe_mesh: f64,
    /// Probe index attaining `lower`; `None` on the exact path.
    pub witness: Option<usize>,
}

impl CoveringRadiusInterval {
    pub fn exact(rho: f64) -> Self {
        CoveringRadiusInterval { lower: rho, upper: rho, probe_mesh: 0.0, witness: None }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Index over `x` with the cell size matched to the covering scale.
pub fn sample_index(domain: &DomainModel, x: &PointSet) -> Result<SpatialIndex> {
    let cell = typical_covering_scale(domain, x.len());
    SpatialIndex::with_cell_size(x, cell)
}

/// Sandwich bounds `[L, L + δ]` from a probe net.
pub fn covering_radius_bounds(domain: &DomainModel, x: &PointSet, probe: &ProbeNet) -> Result<CoveringRadiusInterval> {
    if probe.domain != *domain {
        return invalid("probe net was built for a different domain");
    }
    if x.dim() != domain.ambient_dim() {
        return invalid("sample dimension does not match the domain");
    }
    let index = sample_index(domain, x)?;
    let (witness, l2) = max_nearest(&index, &probe.points);
    let lower = l2.sqrt();
    Ok(CoveringRadiusInterval { lower, upper: lower + probe.certified_mesh, probe_mesh: probe.certified_mesh, witness: Some(witness) })
}

/// Exact radius on one-dimensional domains, sandwich bounds otherwise.
pub fn covering_interval(domain: &DomainModel, x: &PointSet, probe: Option<&ProbeNet>) -> Result<CoveringRadiusInterval> {
    if domain.has_exact_covering() {
        return covering_radius_1d(domain, x).map(CoveringRadiusInterval::exact);
    }
    match probe {
        Some(p) => covering_radius_bounds(domain, x, p),
        None => invalid(format!("the {} domain needs a probe net", domain.name())),
    }
}

/// `max_q d(q, X)²` over the probes with the lowest maximizing probe index.
///
/// Consecutive probes are usually close, so the previous probe's nearest
/// sample bounds the current distance from above; when that bound does not
/// exceed the running maximum the probe cannot raise it and its exact
/// search is skipped. The result equals the full evaluation.
fn max_nearest(index: &SpatialIndex, probes: &PointSet) -> (usize, f64) {
    let samples = index.points();
    let chunks: Vec<(usize, f64)> = (0..probes.len().div_ceil(PROBE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * PROBE_CHUNK;
            let end = (start + PROBE_CHUNK).min(probes.len());
            let mut best = (start, -1.0f64);
            let mut hint: Option<usize> = None;
            for i in start..end {
                let q = probes.get(i);
                if let Some(h) = hint {
                    if dist2(q, samples.get(h)) <= best.1 {
                        continue;
                    }
                }
                let (j, d2) = index.nearest_squared(q);
                hint = Some(j);
                if d2 > best.1 {
                    best = (i, d2);
                }
            }
            best
        })
        .collect();
    chunks.into_iter().fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetVerdict {
    pub value: Verdict,
    /// Distance from `ε` to the bound that decided the verdict; for
    /// `Unknown`, the distance to the violated upper bound.
    pub margin: f64,
    /// Domain point exhibiting a `No`.
    pub witness: Option<Point>,
    /// Confidence half-width used by measure verdicts (0 when exact).
    pub ci_half_width: f64,
}

/// Whether `a` is an `ε`-net of the domain, `ρ(a) ≤ ε`.
pub fn is_eps_net(domain: &DomainModel, a: &PointSet, eps: f64, probe: &ProbeNet) -> Result<NetVerdict> {
    if !(eps > 0.0) {
        return invalid(format!("ε must be positive, got {eps}"));
    }
    let bounds = covering_interval(domain, a, Some(probe))?;
    Ok(verdict_from_bounds(&bounds, eps, probe))
}

pub(crate) fn verdict_from_bounds(bounds: &CoveringRadiusInterval, eps: f64, probe: &ProbeNet) -> NetVerdict {
    let witness = bounds.witness.map(|i| Point::new(probe.points.get(i).to_vec()));
    let (value, margin, witness) = if bounds.upper <= eps {
        (Verdict::Yes, eps - bounds.upper, None)
    } else if bounds.lower > eps {
        (Verdict::No, bounds.lower - eps, witness)
    } else {
        (Verdict::Unknown, bounds.upper - eps, None)
    };
    NetVerdict { value, margin, witness, ci_half_width: 0.0 }
}

/// Whether every ball of measure `≥ ε` meets `a`.
///
/// For a probe `y` let `r_y = d(y, a)`; the open ball `B(y, r_y)` misses `a`,
/// so a lower confidence bound above `ε` refutes the property. Conversely a
/// ball `B(z, r)` missing `a` has `r ≤ d(z, a) ≤ r_y + δ` for the probe `y`
/// nearest `z`, hence `B(z, r) ⊂ B(y, r_y + 2δ)`; upper bounds below `ε`
/// on all those inflated balls confirm it.
pub fn is_measure_eps_net(
    domain: &DomainModel,
    a: &PointSet,
    eps: f64,
    probe: &ProbeNet,
    mc_budget: usize,
    seed: SeedSpec,
) -> Result<NetVerdict> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("ε must lie in (0, 1), got {eps}"));
    }
    if probe.domain != *domain {
        return invalid("probe net was built for a different domain");
    }
    let index = sample_index(domain, a)?;
    let delta = probe.certified_mesh;
    let mut rng_stream = seed.stream_id;
    let mut next_seed = || {
        let s = SeedSpec::new(seed.master_seed, rng_stream);
        rng_stream = rng_stream.wrapping_add(1);
        s
    };
    let mut worst_upper = f64::NEG_INFINITY;
    let mut ci_used = 0.0f64;
    for y in probe.points.iter() {
        let (_, r) = index.nearest(y);
        if r > 0.0 {
            let (m, ci) = ball_measure(domain, y, r, mc_budget, next_seed())?;
            ci_used = ci_used.max(ci);
            if m - ci > eps {
                return Ok(NetVerdict {
                    value: Verdict::No,
                    margin: m - ci - eps,
                    witness: Some(Point::new(y.to_vec())),
                    ci_half_width: ci,
                });
            }
        }
        let (m, ci) = ball_measure(domain, y, r + 2.0 * delta, mc_budget, next_seed())?;
        ci_used = ci_used.max(ci);
        worst_upper = worst_upper.max(m + ci);
    }
    let value = if worst_upper < eps { Verdict::Yes } else { Verdict::Unknown };
    let margin = if value == Verdict::Yes { eps - worst_upper } else { worst_upper - eps };
    Ok(NetVerdict { value, margin, witness: None, ci_half_width: ci_used })
}
