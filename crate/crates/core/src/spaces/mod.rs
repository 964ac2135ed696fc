//! Catalog of metric-measure spaces.
//!
//! Every domain carries the Euclidean metric of its ambient space and its
//! natural normalized measure: surface measure on spheres, volume on balls,
//! cubes and polyhedra, arclength on curves, the arcsine law on `[-1, 1]`
//! and the Cantor measure on the middle-thirds Cantor set.

mod constants;
mod polyhedron;
mod polyline;
mod witness;

use serde::{Deserialize, Serialize};

pub use constants::{
    geometry_constants, hausdorff_mass, limit_constant, min_dihedral_angle, typical_covering_scale,
    unit_ball_volume, unit_ball_volume_real, GeometryConstants,
};
pub use polyhedron::{EdgeSpec, Polyhedron, PolyhedronSpec, Vec3};
pub use polyline::{Polyline, PolylineSpec};
pub use witness::{regularity_witness, PhiKind, RegularityWitness};

pub(crate) use polyhedron::{cross, length, sub, tet_contains};

use crate::error::{Error, Result};
use crate::point::norm;

/// Default digit depth of the Cantor model; `3^-40` is below double
/// precision resolution on `[0, 1]`.
pub const DEFAULT_CANTOR_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainModel {
    /// Unit sphere `S^d` in `R^{d+1}`.
    Sphere { d: usize },
    /// Closed unit ball in `R^d`.
    Ball { d: usize },
    /// Unit cube `[0,1]^d`.
    Cube { d: usize },
    /// `[0, 1]` with Lebesgue measure.
    IntervalUniform {},
    /// `[-1, 1]` with `dx / (π √(1 - x²))`.
    ArcsineInterval {},
    Polyline(Polyline),
    Polyhedron3(Polyhedron),
    /// Middle-thirds Cantor set represented to `depth` ternary digits.
    Cantor { depth: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Sphere,
    Ball,
    Cube,
    IntervalUniform,
    ArcsineInterval,
    Polyline,
    Polyhedron3,
    Cantor,
}

impl DomainModel {
    pub fn sphere(d: usize) -> Result<Self> {
        DomainModel::Sphere { d }.validated()
    }

    pub fn ball(d: usize) -> Result<Self> {
        DomainModel::Ball { d }.validated()
    }

    pub fn cube(d: usize) -> Result<Self> {
        DomainModel::Cube { d }.validated()
    }

    pub fn interval() -> Self {
        DomainModel::IntervalUniform {}
    }

    pub fn arcsine() -> Self {
        DomainModel::ArcsineInterval {}
    }

    pub fn polyline(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Ok(DomainModel::Polyline(Polyline::new(vertices)?))
    }

    pub fn polyhedron(p: Polyhedron) -> Self {
        DomainModel::Polyhedron3(p)
    }

    pub fn cantor(depth: u32) -> Result<Self> {
        DomainModel::Cantor { depth }.validated()
    }

    /// Checks the scalar invariants that serde cannot enforce on its own.
    pub fn validated(self) -> Result<Self> {
        match &self {
            DomainModel::Sphere { d } | DomainModel::Ball { d } | DomainModel::Cube { d } if *d == 0 => {
                Err(Error::InvalidArgument(format!("{}: dimension must be at least 1", self.name())))
            }
            DomainModel::Cantor { depth } if *depth == 0 => {
                Err(Error::InvalidArgument("cantor: depth must be at least 1".into()))
            }
            _ => Ok(self),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<DomainModel>(text)?.validated()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serializes")
    }

    pub fn kind(&self) -> DomainKind {
        match self {
            DomainModel::Sphere { .. } => DomainKind::Sphere,
            DomainModel::Ball { .. } => DomainKind::Ball,
            DomainModel::Cube { .. } => DomainKind::Cube,
            DomainModel::IntervalUniform {} => DomainKind::IntervalUniform,
            DomainModel::ArcsineInterval {} => DomainKind::ArcsineInterval,
            DomainModel::Polyline(_) => DomainKind::Polyline,
            DomainModel::Polyhedron3(_) => DomainKind::Polyhedron3,
            DomainModel::Cantor { .. } => DomainKind::Cantor,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            DomainKind::Sphere => "sphere",
            DomainKind::Ball => "ball",
            DomainKind::Cube => "cube",
            DomainKind::IntervalUniform => "interval_uniform",
            DomainKind::ArcsineInterval => "arcsine_interval",
            DomainKind::Polyline => "polyline",
            DomainKind::Polyhedron3 => "polyhedron3",
            DomainKind::Cantor => "cantor",
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            DomainModel::Sphere { d } => d + 1,
            DomainModel::Ball { d } | DomainModel::Cube { d } => *d,
            DomainModel::IntervalUniform {} | DomainModel::ArcsineInterval {} | DomainModel::Cantor { .. } => 1,
            DomainModel::Polyline(p) => p.dim(),
            DomainModel::Polyhedron3(_) => 3,
        }
    }

    /// Hausdorff dimension of the support.
    pub fn intrinsic_dim(&self) -> f64 {
        match self {
            DomainModel::Sphere { d } | DomainModel::Ball { d } | DomainModel::Cube { d } => *d as f64,
            DomainModel::IntervalUniform {} | DomainModel::ArcsineInterval {} | DomainModel::Polyline(_) => 1.0,
            DomainModel::Polyhedron3(_) => 3.0,
            DomainModel::Cantor { .. } => 2f64.ln() / 3f64.ln(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            DomainModel::Sphere { .. } | DomainModel::Ball { .. } | DomainModel::ArcsineInterval {} => 2.0,
            DomainModel::Cube { d } => (*d as f64).sqrt(),
            DomainModel::IntervalUniform {} | DomainModel::Cantor { .. } => 1.0,
            DomainModel::Polyline(p) => p.diameter(),
            DomainModel::Polyhedron3(p) => p.diameter(),
        }
    }

    /// True when the domain is one-dimensional and its covering radius can
    /// be computed exactly.
    pub fn has_exact_covering(&self) -> bool {
        matches!(
            self,
            DomainModel::IntervalUniform {}
                | DomainModel::ArcsineInterval {}
                | DomainModel::Polyline(_)
                | DomainModel::Sphere { d: 1 }
        )
    }

    /// Membership test with absolute tolerance `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.ambient_dim() || p.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            DomainModel::Sphere { .. } => (norm(p) - 1.0).abs() <= tol,
            DomainModel::Ball { .. } => norm(p) <= 1.0 + tol,
            DomainModel::Cube { .. } => p.iter().all(|&c| (-tol..=1.0 + tol).contains(&c)),
            DomainModel::IntervalUniform {} => (-tol..=1.0 + tol).contains(&p[0]),
            DomainModel::ArcsineInterval {} => (-1.0 - tol..=1.0 + tol).contains(&p[0]),
            DomainModel::Polyline(line) => line.distance_to(p) <= tol,
            DomainModel::Polyhedron3(poly) => poly.contains([p[0], p[1], p[2]], tol),
            DomainModel::Cantor { depth } => cantor_distance(p[0], *depth) <= tol,
        }
    }
}

/// Distance from `x` to the depth-`depth` approximation of the Cantor set
/// (the union of its `2^depth` cylinders).
pub fn cantor_distance(x: f64, depth: u32) -> f64 {
    if x < 0.0 {
        return -x;
    }
    if x > 1.0 {
        return x - 1.0;
    }
    let mut lo = 0.0f64;
    let mut width = 1.0f64;
    for _ in 0..depth.min(60) {
        let third = width / 3.0;
        if x <= lo + third {
            width = third;
        } else if x >= lo + 2.0 * third {
            lo += 2.0 * third;
            width = third;
        } else {
            return (x - (lo + third)).min(lo + 2.0 * third - x);
        }
    }
    0.0
}
