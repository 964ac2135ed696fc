//! Reproducible i.i.d. sampling from each domain's normalized measure.

mod export;
mod rng;

pub use export::{read_binary, read_csv, write_binary, write_csv, Sidecar};
pub use rng::{SeedSpec, StreamRng, GENERATOR_NAME, GENERATOR_VERSION};

use crate::error::{invalid, Result};
use crate::point::PointSet;
use crate::spaces::DomainModel;

/// `N` points drawn i.i.d. from a domain's normalized measure, with the seed
/// that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub domain: DomainModel,
    pub seed: SeedSpec,
    pub points: PointSet,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar::for_points(&self.domain, &self.points, Some(self.seed), None)
    }
}

/// Draws `n` points using stream `seed`.
pub fn sample(domain: &DomainModel, n: usize, seed: SeedSpec) -> Result<SampleSet> {
    if n == 0 {
        return invalid("sample size N must be at least 1");
    }
    let mut rng = seed.rng();
    let points = draw_points(domain, n, &mut rng);
    Ok(SampleSet { domain: domain.clone(), seed, points })
}

/// Trial `t` of a stream uses `SeedSpec(master_seed, t)`, so any single
/// trial can be regenerated on its own.
pub fn sample_stream(
    domain: &DomainModel,
    n: usize,
    master_seed: u64,
    trial_count: usize,
) -> Result<impl Iterator<Item = SampleSet> + '_> {
    if trial_count == 0 {
        return invalid("trial_count must be at least 1");
    }
    if n == 0 {
        return invalid("sample size N must be at least 1");
    }
    Ok((0..trial_count as u64)
        .map(move |t| sample(domain, n, SeedSpec::new(master_seed, t)).expect("validated arguments")))
}

/// Draws `n` points from `domain` using an existing stream.
pub fn draw_points(domain: &DomainModel, n: usize, rng: &mut StreamRng) -> PointSet {
    let dim = domain.ambient_dim();
    let mut out = vec![0.0; n * dim];
    for p in out.chunks_exact_mut(dim) {
        draw_point(domain, rng, p);
    }
    PointSet::from_flat(dim, out)
}

fn draw_point(domain: &DomainModel, rng: &mut StreamRng, p: &mut [f64]) {
    match domain {
        DomainModel::Sphere { .. } => gaussian_direction(rng, p),
        DomainModel::Ball { d } => {
            gaussian_direction(rng, p);
            let radius = rng.uniform().powf(1.0 / *d as f64);
            p.iter_mut().for_each(|c| *c *= radius);
        }
        DomainModel::Cube { .. } | DomainModel::IntervalUniform {} => {
            p.iter_mut().for_each(|c| *c = rng.uniform());
        }
        DomainModel::ArcsineInterval {} => {
            p[0] = (std::f64::consts::PI * rng.uniform_open()).cos();
        }
        DomainModel::Polyline(line) => {
            let target = rng.uniform() * line.length();
            let cum = line.cumulative();
            let edge = (cum.partition_point(|&c| c <= target).max(1) - 1).min(line.edge_count() - 1);
            let t = ((target - cum[edge]) / line.edge_length(edge)).clamp(0.0, 1.0);
            let (a, b) = line.edge(edge);
            for k in 0..p.len() {
                p[k] = a[k] + t * (b[k] - a[k]);
            }
        }
        DomainModel::Polyhedron3(poly) => {
            let cum = poly.tet_cumulative();
            let target = rng.uniform() * poly.volume();
            let tet = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
            let v = poly.tet_vertices(tet);
            let (mut s, mut t, mut u) = (rng.uniform(), rng.uniform(), rng.uniform());
            // Fold the unit cube onto the standard simplex.
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            if t + u > 1.0 {
                let tmp = u;
                u = 1.0 - s - t;
                t = 1.0 - tmp;
            } else if s + t + u > 1.0 {
                let tmp = u;
                u = s + t + u - 1.0;
                s = 1.0 - t - tmp;
            }
            let a = 1.0 - s - t - u;
            for k in 0..3 {
                p[k] = a * v[0][k] + s * v[1][k] + t * v[2][k] + u * v[3][k];
            }
        }
        DomainModel::Cantor { depth } => {
            p[0] = cantor_point(rng, *depth);
        }
    }
}

fn gaussian_direction(rng: &mut StreamRng, p: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for c in p.iter_mut() {
            *c = rng.gaussian();
            n2 += *c * *c;
        }
        if n2 > 0.0 {
            let inv = 1.0 / n2.sqrt();
            p.iter_mut().for_each(|c| *c *= inv);
            return;
        }
    }
}

/// `Σ_{k ≤ depth} 2 b_k 3^{-k}` with fair i.i.d. digits `b_k`.
fn cantor_point(rng: &mut StreamRng, depth: u32) -> f64 {
    let mut x = 0.0;
    let mut scale = 1.0;
    let mut word = 0u64;
    for k in 0..depth {
        if k % 64 == 0 {
            word = rng.next_u64();
        }
        scale /= 3.0;
        if (word >> (k % 64)) & 1 == 1 {
            x += 2.0 * scale;
        }
    }
    x
}

/// Ternary digits of a depth-`depth` Cantor sample, most significant first.
pub fn ternary_digits(x: f64, depth: u32) -> Vec<u8> {
    let mut digits = Vec::with_capacity(depth as usize);
    let mut r = x;
    for _ in 0..depth {
        r *= 3.0;
        // the scaled remainder lies in [0, 1] or [2, 3]
        let d = if r >= 1.5 { 2u8 } else { 0u8 };
        digits.push(d);
        r -= d as f64;
    }
    digits
}
