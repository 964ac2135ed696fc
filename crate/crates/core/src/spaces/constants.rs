use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::DomainModel;
use crate::error::{Error, Result};

/// Volume of the unit ball in `R^s`, `π^{s/2} / Γ(1 + s/2)`.
pub fn unit_ball_volume(s: i64) -> Result<f64> {
    if s < 1 {
        return Err(Error::InvalidArgument(format!("unit ball dimension must be >= 1, got {s}")));
    }
    Ok(unit_ball_volume_real(s as f64))
}

/// Same formula for a real exponent; used for fractal dimensions.
pub fn unit_ball_volume_real(s: f64) -> f64 {
    PI.powf(s / 2.0) / gamma(1.0 + s / 2.0)
}

fn upsilon(d: usize) -> f64 {
    unit_ball_volume_real(d as f64)
}

/// `H_s(K)` normalized so that the unit `s`-cube has mass one.
pub fn hausdorff_mass(domain: &DomainModel) -> Result<f64> {
    match domain {
        DomainModel::Sphere { d } => Ok((*d as f64 + 1.0) * upsilon(d + 1)),
        DomainModel::Ball { d } => Ok(upsilon(*d)),
        DomainModel::Cube { .. } | DomainModel::IntervalUniform {} => Ok(1.0),
        DomainModel::Polyline(p) => Ok(p.length()),
        DomainModel::Polyhedron3(p) => Ok(p.volume()),
        DomainModel::ArcsineInterval {} | DomainModel::Cantor { .. } => Err(Error::UnsupportedDomain(format!(
            "{} has no Hausdorff mass in a limit formula",
            domain.name()
        ))),
    }
}

/// Smallest interior dihedral angle of a polyhedral domain.
pub fn min_dihedral_angle(domain: &DomainModel) -> Result<f64> {
    match domain {
        DomainModel::Polyhedron3(p) => Ok(p.min_dihedral_angle()),
        other => Err(Error::UnsupportedDomain(format!("{} is not a polyhedron", other.name()))),
    }
}

/// Limit of `E[ρ^p] · (N / log N)^{p/s}` as `N → ∞`.
pub fn limit_constant(domain: &DomainModel, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("moment order p must be >= 1, got {p}")));
    }
    let base = match domain {
        DomainModel::Sphere { d } => {
            let d = *d;
            ((d as f64 + 1.0) * upsilon(d + 1) / upsilon(d)).powf(1.0 / d as f64)
        }
        DomainModel::IntervalUniform {} => 0.5,
        DomainModel::Polyline(line) => line.length() / 2.0,
        DomainModel::Ball { d: 1 } => {
            return Err(Error::UnsupportedDomain(
                "ball limit constant requires d >= 2; model [-1, 1] as a polyline".into(),
            ))
        }
        DomainModel::Ball { d } => {
            let d = *d as f64;
            (2.0 * (d - 1.0) / d).powf(1.0 / d)
        }
        DomainModel::Cube { d } => {
            let df = *d as f64;
            (2f64.powf(df - 1.0) / (df * upsilon(*d))).powf(1.0 / df)
        }
        DomainModel::Polyhedron3(poly) => {
            let theta = poly.min_dihedral_angle();
            let v = poly.volume();
            if theta <= PI / 2.0 {
                (2.0 * PI * v / (3.0 * theta * upsilon(3))).cbrt()
            } else {
                (v / PI).cbrt()
            }
        }
        DomainModel::ArcsineInterval {} | DomainModel::Cantor { .. } => {
            return Err(Error::NoSharpConstant(domain.name().into()))
        }
    };
    Ok(base.powf(p))
}

/// Per-domain constants used by the limit formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryConstants {
    pub upsilon_s: f64,
    pub hausdorff_mass: Option<f64>,
    pub limit_constant_base: Option<f64>,
}

pub fn geometry_constants(domain: &DomainModel) -> GeometryConstants {
    GeometryConstants {
        upsilon_s: unit_ball_volume_real(domain.intrinsic_dim()),
        hausdorff_mass: hausdorff_mass(domain).ok(),
        limit_constant_base: limit_constant(domain, 1.0).ok(),
    }
}

/// Natural covering-radius scale `(H_s/υ_s · log N / N)^{1/s}`. Domains
/// without a Hausdorff mass use a unit prefactor.
pub fn typical_covering_scale(domain: &DomainModel, n: usize) -> f64 {
    let s = domain.intrinsic_dim();
    let nf = (n.max(2)) as f64;
    let prefactor = hausdorff_mass(domain).map(|h| h / unit_ball_volume_real(s)).unwrap_or(1.0);
    (prefactor * nf.ln() / nf).powf(1.0 / s)
}
