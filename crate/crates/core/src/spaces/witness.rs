//! Built-in regularity witnesses `c Φ(r) ≤ μ(B(x, r)) ≤ C Φ(r)`, `r < r0`,
//! for the normalized measure of each domain.
//!
//! Derivations of the constants:
//!
//! * sphere `S^d`: a chordal cap of radius `r ≤ 1` has angular radius
//!   `θ = 2 asin(r/2) ≤ πr/3`, so its area is at most `υ_d θ^d`. Orthogonal
//!   projection onto the tangent plane maps it onto a disk of radius
//!   `r √(1 - r²/4) ≥ r √3/2` and does not increase area.
//! * ball: `B(x, r) ∩ B(0, 1)` contains a ball of radius `r/2` for `r ≤ 1`.
//! * cube: for `r ≤ 1/2` some orthant of `B(x, r)` lies in the cube.
//! * polyline: along the curve there is arclength `≥ L/2 ≥ r` in one
//!   direction; each of the `E` edges meets a ball in a segment of length `≤ 2r`.
//! * arcsine: restricted to centers `|x| ≤ 1/2` and `r ≤ 1/4`, the density
//!   on `[-3/4, 3/4]` lies between `1/π` and `4/(π√7)`.
//! * Cantor: a ball of radius `r ∈ [3^-k, 3^-k+1)` contains the level-`k`
//!   cylinder of its center and meets at most two level-`(k-1)` cylinders.
//! * polyhedron: if `x` lies in tetrahedron `T` of diameter `D ≥ r`, the
//!   homothetic copy `x + (r/D)(T - x)` lies in `T ∩ B(x, r)`.

use std::f64::consts::PI;

use super::{constants::unit_ball_volume_real, DomainModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiKind {
    PowerLaw { s: f64 },
    /// `Φ(r) = r^α log^β(1/r)`.
    PowerLog { alpha: f64, beta: f64 },
}

impl PhiKind {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            PhiKind::PowerLaw { s } => r.powf(s),
            PhiKind::PowerLog { alpha, beta } => r.powf(alpha) * (1.0 / r).ln().powf(beta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityWitness {
    pub phi_kind: PhiKind,
    pub c_lower: f64,
    pub c_upper: f64,
    pub r0: f64,
    /// When set, the bounds hold only for centers in this interval.
    pub center_window: Option<(f64, f64)>,
}

impl RegularityWitness {
    pub fn new(phi_kind: PhiKind, c_lower: f64, c_upper: f64, r0: f64) -> Option<Self> {
        let phi_ok = match phi_kind {
            PhiKind::PowerLaw { s } => s > 0.0,
            PhiKind::PowerLog { alpha, beta } => alpha > 0.0 && beta >= 0.0,
        };
        (phi_ok && 0.0 < c_lower && c_lower <= c_upper && r0 > 0.0)
            .then_some(RegularityWitness { phi_kind, c_lower, c_upper, r0, center_window: None })
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.phi_kind.eval(r)
    }

    pub fn bounds(&self, r: f64) -> (f64, f64) {
        let phi = self.phi(r);
        (self.c_lower * phi, self.c_upper * phi)
    }
}

fn power_law(s: f64, c_lower: f64, c_upper: f64, r0: f64) -> RegularityWitness {
    RegularityWitness::new(PhiKind::PowerLaw { s }, c_lower, c_upper, r0).expect("built-in witness is valid")
}

pub fn regularity_witness(domain: &DomainModel) -> RegularityWitness {
    match domain {
        DomainModel::Sphere { d } => {
            let df = *d as f64;
            let total = (df + 1.0) * unit_ball_volume_real(df + 1.0);
            let ups = unit_ball_volume_real(df);
            power_law(df, ups * (3f64.sqrt() / 2.0).powf(df) / total, ups * (PI / 3.0).powf(df) / total, 1.0)
        }
        DomainModel::Ball { d } => power_law(*d as f64, 0.5f64.powi(*d as i32), 1.0, 1.0),
        DomainModel::Cube { d } => {
            let ups = unit_ball_volume_real(*d as f64);
            power_law(*d as f64, ups * 0.5f64.powi(*d as i32), ups, 0.5)
        }
        DomainModel::IntervalUniform {} => power_law(1.0, 1.0, 2.0, 0.5),
        DomainModel::Polyline(line) => {
            let len = line.length();
            power_law(1.0, 1.0 / len, 2.0 * line.edge_count() as f64 / len, len / 2.0)
        }
        DomainModel::ArcsineInterval {} => {
            let mut w = power_law(1.0, 2.0 / PI, 8.0 / (PI * 7f64.sqrt()), 0.25);
            w.center_window = Some((-0.5, 0.5));
            w
        }
        DomainModel::Cantor { .. } => power_law(2f64.ln() / 3f64.ln(), 0.5, 4.0, 1.0),
        DomainModel::Polyhedron3(poly) => {
            let v = poly.volume();
            let mut c_lower = f64::INFINITY;
            let mut r0 = f64::INFINITY;
            for i in 0..poly.tetrahedra().len() {
                let t = poly.tet_vertices(i);
                let mut diam = 0.0f64;
                for a in 0..4 {
                    for b in a + 1..4 {
                        diam = diam.max(super::length(super::sub(t[a], t[b])));
                    }
                }
                c_lower = c_lower.min(poly.tet_volumes()[i] / (v * diam.powi(3)));
                r0 = r0.min(diam);
            }
            power_law(3.0, c_lower, unit_ball_volume_real(3.0) / v, r0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_and_square_witnesses() {
        let w = regularity_witness(&DomainModel::interval());
        assert_eq!((w.c_lower, w.c_upper, w.r0), (1.0, 2.0, 0.5));
        assert_eq!(w.phi_kind, PhiKind::PowerLaw { s: 1.0 });
        let w = regularity_witness(&DomainModel::cube(2).unwrap());
        assert!((w.c_lower - PI / 4.0).abs() < 1e-14);
        assert!((w.c_upper - PI).abs() < 1e-14);
        assert_eq!(w.r0, 0.5);
    }

    #[test]
    fn cantor_exponent() {
        let w = regularity_witness(&DomainModel::cantor(40).unwrap());
        match w.phi_kind {
            PhiKind::PowerLaw { s } => assert!((s - 0.6309297535714574).abs() < 1e-15),
            _ => panic!("expected a power law"),
        }
    }

    #[test]
    fn constructor_enforces_invariants() {
        assert!(RegularityWitness::new(PhiKind::PowerLaw { s: 1.0 }, 2.0, 1.0, 1.0).is_none());
        assert!(RegularityWitness::new(PhiKind::PowerLog { alpha: 1.0, beta: -1.0 }, 1.0, 1.0, 1.0).is_none());
        let w = RegularityWitness::new(PhiKind::PowerLog { alpha: 2.0, beta: 1.0 }, 1.0, 3.0, 0.5).unwrap();
        assert!((w.phi(0.1) - 0.01 * 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sphere_bounds_bracket_exact_cap() {
        // S^2 chord caps have normalized area r²/4 exactly.
        let w = regularity_witness(&DomainModel::sphere(2).unwrap());
        for r in [0.01, 0.3, 0.99] {
            let (lo, hi) = w.bounds(r);
            let exact = r * r / 4.0;
            assert!(lo <= exact && exact <= hi);
        }
    }
}
