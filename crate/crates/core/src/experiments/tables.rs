//! Occupancy-function grids and the limit-constant table.

use serde::{Deserialize, Serialize};

use super::output::{num, opt, CsvRow};
use crate::auxfn::{f_dp, f_lower_bound, regime_params, OccupancyParams, RegimeSpec};
use crate::error::{invalid, Result};
use crate::spaces::{hausdorff_mass, limit_constant, DomainModel, Polyhedron};

/// Either a regime evaluated along `n_grid` or explicit `(N, n, m)` triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeSpec>,
    #[serde(default)]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub triples: Vec<(u64, f64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgridRow {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: f64,
    pub m: u64,
    pub f_dp: f64,
    pub f_lower_bound: f64,
}

impl CsvRow for FgridRow {
    const HEADER: &'static [&'static str] = &["N", "n", "m", "f_dp", "f_lower_bound"];

    fn fields(&self) -> Vec<String> {
        vec![self.big_n.to_string(), num(self.n), self.m.to_string(), num(self.f_dp), num(self.f_lower_bound)]
    }
}

impl FgridRow {
    pub fn evaluate(params: &OccupancyParams) -> Self {
        FgridRow {
            big_n: params.big_n,
            n: params.n,
            m: params.m,
            f_dp: f_dp(params),
            f_lower_bound: f_lower_bound(params),
        }
    }
}

/// Evaluates the grid. Regime points where the parameters are invalid
/// (for example `n > N` at small `N`) are skipped; invalid explicit triples
/// are errors.
pub fn run_fgrid(config: &FgridConfig) -> Result<Vec<FgridRow>> {
    if config.regime.is_none() && config.triples.is_empty() {
        return invalid("an f-grid needs a regime with n_grid or explicit triples");
    }
    let mut rows = Vec::new();
    if let Some(spec) = &config.regime {
        spec.validate()?;
        if config.n_grid.is_empty() {
            return invalid("a regime grid needs a nonempty n_grid");
        }
        for &big_n in &config.n_grid {
            if let Ok(p) = regime_params(spec, big_n) {
                rows.push(FgridRow::evaluate(&p));
            }
        }
    }
    for &(big_n, n, m) in &config.triples {
        rows.push(FgridRow::evaluate(&OccupancyParams::new(big_n, n, m)?));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub domain: String,
    pub intrinsic_dim: f64,
    pub hausdorff_mass: Option<f64>,
    pub limit_constant: Option<f64>,
}

impl CsvRow for ConstantRow {
    const HEADER: &'static [&'static str] = &["domain", "s", "hausdorff_mass", "limit_constant"];

    fn fields(&self) -> Vec<String> {
        vec![self.domain.clone(), num(self.intrinsic_dim), opt(self.hausdorff_mass), opt(self.limit_constant)]
    }
}

/// Labelled standard domains for the constants table.
pub fn standard_domains() -> Vec<(String, DomainModel)> {
    let mut out = vec![
        ("interval".to_string(), DomainModel::interval()),
        ("arcsine".to_string(), DomainModel::arcsine()),
        ("cantor".to_string(), DomainModel::Cantor { depth: crate::spaces::DEFAULT_CANTOR_DEPTH }),
    ];
    for d in 1..=4 {
        out.push((format!("sphere_{d}"), DomainModel::Sphere { d }));
    }
    for d in 2..=4 {
        out.push((format!("ball_{d}"), DomainModel::Ball { d }));
    }
    for d in 1..=4 {
        out.push((format!("cube_{d}"), DomainModel::Cube { d }));
    }
    out.push(("unit_box".to_string(), DomainModel::Polyhedron3(Polyhedron::unit_box())));
    out.push(("regular_tetrahedron".to_string(), DomainModel::Polyhedron3(Polyhedron::regular_tetrahedron())));
    out
}

/// Limit constants of `E[ρ^p] (N/log N)^{p/s}` for the standard domains;
/// empty where no sharp constant is known.
pub fn constants_table(p: f64) -> Result<Vec<ConstantRow>> {
    if !(p.is_finite() && p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    Ok(standard_domains()
        .into_iter()
        .map(|(name, d)| ConstantRow {
            domain: name,
            intrinsic_dim: d.intrinsic_dim(),
            hausdorff_mass: hausdorff_mass(&d).ok(),
            limit_constant: limit_constant(&d, p).ok(),
        })
        .collect())
}
