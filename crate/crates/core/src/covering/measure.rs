//! Normalized measure of balls `μ(B(x, r))`.

use statrs::function::beta::beta_reg;

use crate::error::{invalid, Result};
use crate::point::dist2;
use crate::sampler::{draw_points, SeedSpec};
use crate::spaces::{DomainModel, Polyline};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Smallest Monte Carlo budget accepted by [`ball_measure`].
pub const MIN_MC_BUDGET: usize = 100;

const MC_CHUNK: usize = 4096;

/// Estimate of `μ(B(center, r))` with the half-width of its 99% confidence
/// interval. Exact branches report a zero half-width.
pub fn ball_measure(domain: &DomainModel, center: &[f64], r: f64, mc_budget: usize, seed: SeedSpec) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    if center.len() != domain.ambient_dim() {
        return invalid("center dimension does not match the domain");
    }
    if let Some(m) = exact_ball_measure(domain, center, r) {
        return Ok((m.clamp(0.0, 1.0), 0.0));
    }
    if mc_budget < MIN_MC_BUDGET {
        return invalid(format!("Monte Carlo budget {mc_budget} is below {MIN_MC_BUDGET}"));
    }
    let mut rng = seed.rng();
    let r2 = r * r;
    let mut hits = 0usize;
    let mut left = mc_budget;
    while left > 0 {
        let k = left.min(MC_CHUNK);
        let pts = draw_points(domain, k, &mut rng);
        hits += pts.iter().filter(|p| dist2(p, center) <= r2).count();
        left -= k;
    }
    let p = hits as f64 / mc_budget as f64;
    Ok((p, Z99 * (p * (1.0 - p) / mc_budget as f64).sqrt()))
}

/// Closed-form ball measure where one is available.
pub fn exact_ball_measure(domain: &DomainModel, center: &[f64], r: f64) -> Option<f64> {
    let x = center[0];
    match domain {
        DomainModel::IntervalUniform {} | DomainModel::Cube { d: 1 } => Some(((x + r).min(1.0) - (x - r).max(0.0)).max(0.0)),
        DomainModel::ArcsineInterval {} => Some((arcsine_cdf(x + r) - arcsine_cdf(x - r)).max(0.0)),
        DomainModel::Sphere { d } => Some(sphere_cap(*d, center, r)),
        DomainModel::Polyline(line) => Some(polyline_ball(line, center, r)),
        DomainModel::Cantor { depth } => Some(cantor_cdf(x + r, *depth) - cantor_cdf(x - r, *depth)),
        _ => None,
    }
}

/// `F(x) = 1 - arccos(x)/π` clamped to `[-1, 1]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    1.0 - x.clamp(-1.0, 1.0).acos() / std::f64::consts::PI
}

/// Cantor function on the first `depth` ternary digits.
pub fn cantor_cdf(x: f64, depth: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut r = x;
    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..depth.min(64) {
        r *= 3.0;
        let digit = r.floor().min(2.0);
        r -= digit;
        if digit == 1.0 {
            return value + weight;
        }
        if digit == 2.0 {
            value += weight;
        }
        weight /= 2.0;
    }
    value
}

/// Normalized area of the chordal cap `{y ∈ S^d : |y - c| ≤ r}` for
/// `|c| = 1`: `½ I_{sin²θ}(d/2, 1/2)` at angular radius `θ ≤ π/2`.
fn sphere_cap(d: usize, center: &[f64], r: f64) -> f64 {
    let norm = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return if r >= 1.0 { 1.0 } else { 0.0 };
    }
    // an off-sphere centre cuts the same cap as its projection with this chord
    let chord2 = (r * r - (norm - 1.0).powi(2)) / norm;
    if chord2 <= 0.0 {
        return 0.0;
    }
    let r = chord2.sqrt();
    if r >= 2.0 {
        return 1.0;
    }
    let sin2 = r * r * (1.0 - r * r / 4.0);
    let half = 0.5 * beta_reg(d as f64 / 2.0, 0.5, sin2.clamp(0.0, 1.0));
    if r * r <= 2.0 {
        half
    } else {
        1.0 - half
    }
}

/// Fraction of arclength within distance `r` of `c`: each edge meets the
/// ball in one parameter interval.
fn polyline_ball(line: &Polyline, c: &[f64], r: f64) -> f64 {
    let mut inside = 0.0;
    for e in 0..line.edge_count() {
        let (a, b) = line.edge(e);
        let len = line.edge_length(e);
        let t0: f64 = c.iter().zip(a).zip(b).map(|((ci, ai), bi)| (ci - ai) * (bi - ai)).sum::<f64>() / len;
        let foot: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| ai + t0 * (bi - ai) / len).collect();
        let h2 = dist2(c, &foot);
        if h2 > r * r {
            continue;
        }
        let w = (r * r - h2).sqrt();
        inside += ((t0 + w).min(len) - (t0 - w).max(0.0)).max(0.0);
    }
    inside / line.length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::dist;
    use std::f64::consts::PI;

    fn seed() -> SeedSpec {
        SeedSpec::new(17, 0)
    }

    #[test]
    fn interval_clipped_length() {
        assert_eq!(ball_measure(&DomainModel::interval(), &[0.0], 0.3, 0, seed()).unwrap(), (0.3, 0.0));
        assert_eq!(ball_measure(&DomainModel::interval(), &[0.5], 2.0, 0, seed()).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn arcsine_edge_window_matches_integration() {
        let u = 0.01;
        let (m, ci) = ball_measure(&DomainModel::arcsine(), &[1.0], u, 0, seed()).unwrap();
        assert_eq!(ci, 0.0);
        assert!((m - (1.0 - u).acos() / PI).abs() < 1e-15);
        // x = 1 - s² turns the density into 2 / (π √(2 - s²)) on [0, √u]
        let n = 1000;
        let h = u.sqrt() / n as f64;
        let g = |s: f64| 2.0 / (PI * (2.0 - s * s).sqrt());
        let numeric = h / 3.0
            * (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    w * g(k as f64 * h)
                })
                .sum::<f64>();
        assert!((m - numeric).abs() < 1e-12);
    }

    #[test]
    fn corner_quarter_disk() {
        let (m, ci) = ball_measure(&DomainModel::cube(2).unwrap(), &[0.0, 0.0], 0.2, 1_000_000, seed()).unwrap();
        assert!(ci > 0.0);
        assert!((m - PI * 0.04 / 4.0).abs() <= ci, "{m} ± {ci}");
    }

    #[test]
    fn circle_and_sphere_caps() {
        let circle = DomainModel::sphere(1).unwrap();
        // chord r = 2 sin(θ/2) subtends arc fraction θ/π
        for theta in [0.1, 1.0, 2.0, 3.0] {
            let r = 2.0 * (theta / 2.0f64).sin();
            let (m, _) = ball_measure(&circle, &[1.0, 0.0], r, 0, seed()).unwrap();
            assert!((m - theta / PI).abs() < 1e-12);
        }
        let s2 = DomainModel::sphere(2).unwrap();
        for r in [0.1, 1.0, 1.5, 1.9] {
            let (m, _) = ball_measure(&s2, &[0.0, 0.0, 1.0], r, 0, seed()).unwrap();
            assert!((m - r * r / 4.0).abs() < 1e-12);
        }
        let s3 = DomainModel::sphere(3).unwrap();
        let (exact, _) = ball_measure(&s3, &[1.0, 0.0, 0.0, 0.0], 1.2, 0, seed()).unwrap();
        let mut rng = seed().rng();
        let pts = draw_points(&s3, 400_000, &mut rng);
        let hits = pts.iter().filter(|p| dist(p, &[1.0, 0.0, 0.0, 0.0]) <= 1.2).count() as f64 / 4e5;
        assert!((exact - hits).abs() < 4.0 * (hits * (1.0 - hits) / 4e5).sqrt());
    }

    #[test]
    fn whole_domain_has_measure_one() {
        let domains = [
            DomainModel::interval(),
            DomainModel::arcsine(),
            DomainModel::sphere(1).unwrap(),
            DomainModel::sphere(4).unwrap(),
            DomainModel::polyline(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]]).unwrap(),
            DomainModel::cantor(40).unwrap(),
        ];
        for dom in domains {
            let mut c = vec![0.0; dom.ambient_dim()];
            if let DomainModel::Sphere { .. } = dom {
                c[0] = 1.0;
            }
            let (m, _) = ball_measure(&dom, &c, dom.diameter() + 1.0, 0, seed()).unwrap();
            assert!((m - 1.0).abs() < 1e-12, "{}", dom.name());
        }
    }

    #[test]
    fn cantor_cdf_values() {
        assert_eq!(cantor_cdf(1.0 / 3.0, 40), 0.5);
        assert_eq!(cantor_cdf(0.5, 40), 0.5);
        assert!((cantor_cdf(0.25, 40) - 1.0 / 3.0).abs() < 1e-9);
        let (m, _) = ball_measure(&DomainModel::cantor(40).unwrap(), &[0.0], 1.0 / 3.0, 0, seed()).unwrap();
        assert_eq!(m, 0.5);
    }

    #[test]
    fn polyline_ball_length() {
        let line = DomainModel::polyline(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 2.0]]).unwrap();
        let (m, _) = ball_measure(&line, &[2.0, 0.0], 0.5, 0, seed()).unwrap();
        assert!((m - 0.25).abs() < 1e-15);
    }

    #[test]
    fn budget_and_radius_checks() {
        let cube = DomainModel::cube(2).unwrap();
        assert!(ball_measure(&cube, &[0.5, 0.5], 0.1, 99, seed()).is_err());
        assert!(ball_measure(&cube, &[0.5, 0.5], 0.0, 1000, seed()).is_err());
        assert!(ball_measure(&DomainModel::interval(), &[0.5], 0.1, 0, seed()).is_ok());
    }
}
