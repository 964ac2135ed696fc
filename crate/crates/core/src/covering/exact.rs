//! Exact covering radii in one dimension.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::point::{dist2, PointSet};
use crate::spaces::{DomainModel, Polyline};

/// Tolerance for accepting sample points as lying on the domain.
const ON_DOMAIN_TOL: f64 = 1e-9;

fn check_points(domain: &DomainModel, x: &PointSet) -> Result<()> {
    if x.is_empty() {
        return invalid("point set is empty");
    }
    if x.dim() != domain.ambient_dim() {
        return invalid(format!("points have dimension {}, domain needs {}", x.dim(), domain.ambient_dim()));
    }
    if let Some(p) = x.iter().find(|p| !domain.contains(p, ON_DOMAIN_TOL)) {
        return invalid(format!("point {p:?} is not on the {} domain", domain.name()));
    }
    Ok(())
}

fn sorted_scalars(x: &PointSet) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|p| p[0]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Covering radius of sorted points `v` in `[a, b]`.
fn segment_radius(v: &[f64], a: f64, b: f64) -> f64 {
    let mut r = (v[0] - a).max(b - v[v.len() - 1]);
    for w in v.windows(2) {
        r = r.max((w[1] - w[0]) / 2.0);
    }
    r
}

/// Sorted angles in `[0, 2π)` of points on the unit circle.
fn sorted_angles(x: &PointSet) -> Vec<f64> {
    let mut t: Vec<f64> = x.iter().map(|p| p[1].atan2(p[0]).rem_euclid(TAU)).collect();
    t.sort_by(f64::total_cmp);
    t
}

fn max_circular_gap(t: &[f64]) -> f64 {
    let mut g = t[0] + TAU - t[t.len() - 1];
    for w in t.windows(2) {
        g = g.max(w[1] - w[0]);
    }
    g
}

/// Exact covering radius on the interval, the arcsine interval, the circle
/// `S^1` (chordal metric) or a polyline.
pub fn covering_radius_1d(domain: &DomainModel, x: &PointSet) -> Result<f64> {
    check_points(domain, x)?;
    match domain {
        DomainModel::IntervalUniform {} => Ok(segment_radius(&sorted_scalars(x), 0.0, 1.0)),
        DomainModel::ArcsineInterval {} => Ok(segment_radius(&sorted_scalars(x), -1.0, 1.0)),
        DomainModel::Sphere { d: 1 } => Ok(2.0 * (max_circular_gap(&sorted_angles(x)) / 4.0).sin()),
        DomainModel::Polyline(line) => Ok(polyline_radius(line, x)),
        _ => invalid(format!("no exact covering radius for the {} domain", domain.name())),
    }
}

/// Covering radius of points on the unit circle in the arclength metric:
/// half the largest angular gap.
pub fn circle_arclength_radius(x: &PointSet) -> Result<f64> {
    check_points(&DomainModel::Sphere { d: 1 }, x)?;
    Ok(max_circular_gap(&sorted_angles(x)) / 2.0)
}

/// Squared distance `(t - t0)² + h2` to a sample, in edge arclength `t`.
#[derive(Clone, Copy, Debug)]
struct Parabola {
    t0: f64,
    h2: f64,
}

impl Parabola {
    fn eval(self, t: f64) -> f64 {
        (t - self.t0) * (t - self.t0) + self.h2
    }

    /// Abscissa where `self` and `other` (with `other.t0 > self.t0`) agree.
    fn meet(self, other: Parabola) -> f64 {
        0.5 * (self.t0 + other.t0) + (other.h2 - self.h2) / (2.0 * (other.t0 - self.t0))
    }
}

/// Exact sup over one edge of the squared distance to the nearest sample.
///
/// Every squared distance is `t² - 2 t t_j + c_j`, so their minimum is `t²`
/// plus the lower envelope of lines with slopes `-2 t_j`. Between envelope
/// breakpoints the function is a convex parabola, hence its sup is attained
/// at a breakpoint or at an end of the edge.
fn edge_sup2(a: &[f64], b: &[f64], len: f64, x: &PointSet) -> f64 {
    let dir: Vec<f64> = a.iter().zip(b).map(|(p, q)| (q - p) / len).collect();
    let mut curves: Vec<Parabola> = x
        .iter()
        .map(|p| {
            let t0: f64 = p.iter().zip(a).zip(&dir).map(|((pi, ai), ui)| (pi - ai) * ui).sum();
            let foot: Vec<f64> = a.iter().zip(&dir).map(|(ai, ui)| ai + t0 * ui).collect();
            Parabola { t0, h2: dist2(p, &foot) }
        })
        .collect();
    curves.sort_by(|p, q| p.t0.total_cmp(&q.t0).then(p.h2.total_cmp(&q.h2)));
    curves.dedup_by(|later, earlier| later.t0 == earlier.t0);

    let mut hull: Vec<Parabola> = Vec::with_capacity(curves.len());
    for c in curves {
        while hull.len() >= 2 {
            let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if p.meet(c) <= p.meet(q) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }

    let lower_env = |t: f64| hull.iter().map(|c| c.eval(t)).fold(f64::INFINITY, f64::min);
    let mut best = lower_env(0.0).max(lower_env(len));
    for w in hull.windows(2) {
        let t = w[0].meet(w[1]);
        if t > 0.0 && t < len {
            best = best.max(w[0].eval(t).min(w[1].eval(t)));
        }
    }
    best
}

fn polyline_radius(line: &Polyline, x: &PointSet) -> f64 {
    (0..line.edge_count())
        .map(|e| {
            let (a, b) = line.edge(e);
            edge_sup2(a, b, line.edge_length(e), x)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSide {
    /// `[1 - N^-a, 1]`.
    RightEdge,
    /// `[-1 + N^-a, 1 - N^-a]`.
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub a_exponent: f64,
    pub side: WindowSide,
}

impl WindowSpec {
    pub fn new(a_exponent: f64, side: WindowSide) -> Result<Self> {
        if !(a_exponent.is_finite() && a_exponent > 0.0) {
            return invalid(format!("window exponent must be positive and finite, got {a_exponent}"));
        }
        Ok(WindowSpec { a_exponent, side })
    }

    /// The window `[lo, hi] ⊂ [-1, 1]` for sample size `n`.
    pub fn bounds(&self, n: usize) -> Result<(f64, f64)> {
        let u = (n as f64).powf(-self.a_exponent);
        match self.side {
            WindowSide::RightEdge if u < 2.0 => Ok((1.0 - u, 1.0)),
            WindowSide::Interior if u < 1.0 => Ok((-1.0 + u, 1.0 - u)),
            _ => invalid(format!("window with width parameter {u} is degenerate")),
        }
    }
}

/// Exact `sup_{y ∈ [lo, hi]} min_j |y - x_j|` over an arcsine-interval window.
/// Points outside the window still act as centres.
pub fn covering_radius_window(x: &PointSet, window: WindowSpec, n_for_window: usize) -> Result<f64> {
    check_points(&DomainModel::ArcsineInterval {}, x)?;
    let (lo, hi) = window.bounds(n_for_window)?;
    Ok(window_radius(&sorted_scalars(x), lo, hi))
}

/// Sup of the distance to sorted `v` over `[lo, hi]`: attained at a window
/// end or at an interior gap midpoint.
pub(crate) fn window_radius(v: &[f64], lo: f64, hi: f64) -> f64 {
    let nearest = |y: f64| {
        let k = v.partition_point(|&p| p < y);
        let right = v.get(k).map_or(f64::INFINITY, |p| p - y);
        let left = if k > 0 { y - v[k - 1] } else { f64::INFINITY };
        left.min(right)
    };
    let mut best = nearest(lo).max(nearest(hi));
    let start = v.partition_point(|&p| p < lo).saturating_sub(1);
    for w in v[start..].windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid > hi {
            break;
        }
        if mid > lo {
            best = best.max(0.5 * (w[1] - w[0]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::dist;
    use std::f64::consts::PI;

    fn circle_points(angles: &[f64]) -> PointSet {
        let pts: Vec<[f64; 2]> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
        PointSet::from_points(2, &pts)
    }

    #[test]
    fn interval_examples() {
        let i = DomainModel::interval();
        assert_eq!(covering_radius_1d(&i, &PointSet::from_scalars(&[0.0, 1.0])).unwrap(), 0.5);
        assert_eq!(covering_radius_1d(&i, &PointSet::from_scalars(&[0.5])).unwrap(), 0.5);
        assert!(covering_radius_1d(&i, &PointSet::new(1)).is_err());
        assert!(covering_radius_1d(&i, &PointSet::from_scalars(&[1.5])).is_err());
    }

    #[test]
    fn circle_four_points() {
        let x = circle_points(&[0.0, PI / 2.0, PI, 1.5 * PI]);
        let r = covering_radius_1d(&DomainModel::sphere(1).unwrap(), &x).unwrap();
        assert!((r - 2.0 * (PI / 8.0).sin()).abs() < 1e-15);
        // dense angular brute force
        let n = 628_319;
        let brute = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                x.iter().map(|p| dist(p, &[t.cos(), t.sin()])).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!((brute - r).abs() < 1e-5);
        assert!((circle_arclength_radius(&x).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn single_point_on_circle() {
        let x = circle_points(&[1.0]);
        assert!((covering_radius_1d(&DomainModel::sphere(1).unwrap(), &x).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polyline_matches_dense_scan() {
        let line = DomainModel::polyline(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![0.5, 1.5]]).unwrap();
        let x = PointSet::from_points(2, &[[0.3, 0.0], [2.0, 0.2], [1.0, 4.0 / 3.0], [2.0, 0.9]]);
        let r = covering_radius_1d(&line, &x).unwrap();
        let DomainModel::Polyline(pl) = &line else { unreachable!() };
        let mut brute = 0.0f64;
        for e in 0..pl.edge_count() {
            let (a, b) = pl.edge(e);
            for k in 0..=100_000 {
                let t = k as f64 / 100_000.0;
                let y = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                brute = brute.max(x.iter().map(|p| dist(p, &y)).fold(f64::INFINITY, f64::min));
            }
        }
        assert!(r >= brute - 1e-12 && r - brute < 1e-4, "{r} vs {brute}");
    }

    #[test]
    fn window_examples() {
        let u = 0.01;
        let w = WindowSpec::new(1.0, WindowSide::RightEdge).unwrap();
        let x = PointSet::from_scalars(&[1.0 - 2.0 * u, 1.0]);
        assert!((covering_radius_window(&x, w, 100).unwrap() - u).abs() < 1e-15);
        let x = PointSet::from_scalars(&[1.0 - u, 1.0 - u / 2.0, 1.0]);
        assert!((covering_radius_window(&x, w, 100).unwrap() - u / 4.0).abs() < 1e-15);
        let x = PointSet::from_scalars(&[1.0 - 2.0 * u]);
        assert!((covering_radius_window(&x, w, 100).unwrap() - 2.0 * u).abs() < 1e-15);
    }

    #[test]
    fn window_matches_grid() {
        let v = [-0.9, -0.2, 0.1, 0.15, 0.7];
        let (lo, hi) = (-0.5, 0.8);
        let exact = window_radius(&v, lo, hi);
        let brute = (0..=1_000_000)
            .map(|k| {
                let y = lo + (hi - lo) * k as f64 / 1e6;
                v.iter().map(|p| (p - y).abs()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!((exact - brute).abs() < 1e-6);
    }

    #[test]
    fn degenerate_windows() {
        assert!(WindowSpec::new(0.0, WindowSide::RightEdge).is_err());
        let w = WindowSpec::new(0.5, WindowSide::Interior).unwrap();
        assert!(w.bounds(1).is_err());
        assert!(w.bounds(4).is_ok());
    }
}
