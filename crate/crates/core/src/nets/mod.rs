//! Probe nets with certified mesh, greedy separated nets and the
//! nearest-neighbour index.
//!
//! A probe net for a domain `K` is a finite `P ⊂ K` with a certified mesh
//! `δ`: every `y ∈ K` lies within `δ` of `P`. Mesh certificates:
//!
//! * interval, arcsine interval, polyline: equispaced vertices along each
//!   segment; a point is within half a step of a vertex.
//! * cube: cell centres of a uniform grid; half the cell diagonal.
//! * ball: centres of the grid cells meeting the ball, projected onto the
//!   ball. The metric projection onto a convex set is 1-Lipschitz and fixes
//!   `y`, so `|y - π(c)| ≤ |y - c|` is at most half the cell diagonal.
//! * sphere `S^1`: equiangular points; the chord to the nearest is at most
//!   `2 sin(π / 2n)`.
//! * sphere `S^d`, `d ≥ 2`: cell centres on the faces of `[-1, 1]^{d+1}`
//!   mapped by `x ↦ x/|x|`. For `y ∈ S^d` the radial point `y/|y|_∞` lies on
//!   a face within half a cell diagonal `h` of a centre `c`, and `x ↦ x/|x|`
//!   is 1-Lipschitz on `|x| ≥ 1`, so `|y - c/|c|| ≤ h`.
//! * polyhedron: grid cell centres inside `P` at mesh `δ/2` together with
//!   subdivided boundary triangles at mesh `δ/2`. If the centre `c` of the
//!   cell of `y` lies outside `P`, the segment `[y, c]` meets `∂P` at some
//!   `z` with `|y - z| ≤ δ/2`, and `z` is within `δ/2` of a boundary point.
//!   A triangle of longest side `ℓ` is covered by its vertices at radius
//!   `ℓ/√3`.
//! * Cantor set: endpoints of the level-`k` cylinders; a cylinder has length
//!   `3^-k`.

mod index;

use std::path::Path;

pub use index::{brute_force_nearest, SpatialIndex};

use crate::error::{invalid, Error, Result};
use crate::point::{dist2, PointSet};
use crate::sampler::{write_binary, Sidecar};
use crate::spaces::{length, sub, DomainModel, Polyhedron, Polyline, Vec3};

/// Largest probe net that will be materialized.
pub const MAX_PROBE_POINTS: usize = 1 << 28;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeNet {
    pub domain: DomainModel,
    pub points: PointSet,
    pub certified_mesh: f64,
}

impl ProbeNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar::for_points(&self.domain, &self.points, None, Some(self.certified_mesh))
    }

    /// Writes the net in the sample-set binary format; the sidecar carries
    /// `certified_mesh`.
    pub fn export(&self, path: &Path) -> Result<()> {
        write_binary(path, &self.points, &self.sidecar())
    }
}

fn check_count(count: f64) -> Result<()> {
    if count.is_finite() && count <= MAX_PROBE_POINTS as f64 {
        Ok(())
    } else {
        Err(Error::ResourceLimit(format!(
            "probe net would hold {count:.3e} points (limit {MAX_PROBE_POINTS})"
        )))
    }
}

fn steps(extent: f64, step: f64) -> Result<usize> {
    let n = (extent / step).ceil().max(1.0);
    check_count(n)?;
    Ok(n as usize)
}

/// Builds a probe net on `domain` with certified mesh at most `target_mesh`.
pub fn build_probe_net(domain: &DomainModel, target_mesh: f64) -> Result<ProbeNet> {
    if !(target_mesh.is_finite() && target_mesh > 0.0) {
        return invalid(format!("target mesh must be positive, got {target_mesh}"));
    }
    let delta = target_mesh;
    let (points, mesh) = match domain {
        DomainModel::IntervalUniform {} => segment_grid(0.0, 1.0, delta)?,
        DomainModel::ArcsineInterval {} => segment_grid(-1.0, 1.0, delta)?,
        DomainModel::Polyline(line) => polyline_grid(line, delta)?,
        DomainModel::Cube { d } => cube_grid(*d, delta)?,
        DomainModel::Ball { d } => ball_grid(*d, delta)?,
        DomainModel::Sphere { d: 1 } => circle_grid(delta)?,
        DomainModel::Sphere { d } => sphere_grid(*d, delta)?,
        DomainModel::Polyhedron3(poly) => polyhedron_grid(poly, delta)?,
        DomainModel::Cantor { depth } => cantor_grid(*depth, delta)?,
    };
    debug_assert!(mesh <= delta * (1.0 + 1e-12));
    Ok(ProbeNet { domain: domain.clone(), points, certified_mesh: mesh })
}

/// Approximate number of points [`build_probe_net`] produces, without
/// building the net.
pub fn probe_net_size(domain: &DomainModel, target_mesh: f64) -> f64 {
    let delta = target_mesh;
    let grid = |extent: f64, step: f64| (extent / step).ceil().max(1.0);
    match domain {
        DomainModel::IntervalUniform {} => grid(1.0, 2.0 * delta) + 1.0,
        DomainModel::ArcsineInterval {} => grid(2.0, 2.0 * delta) + 1.0,
        DomainModel::Polyline(line) => {
            1.0 + (0..line.edge_count()).map(|e| grid(line.edge_length(e), 2.0 * delta)).sum::<f64>()
        }
        DomainModel::Cube { d } => grid((*d as f64).sqrt(), 2.0 * delta).powi(*d as i32),
        DomainModel::Ball { d } => {
            let n = grid((*d as f64).sqrt(), delta);
            n.powi(*d as i32) * crate::spaces::unit_ball_volume_real(*d as f64) / 2f64.powi(*d as i32)
        }
        DomainModel::Sphere { d: 1 } => grid(std::f64::consts::PI, delta).max(3.0),
        DomainModel::Sphere { d } => 2.0 * (*d as f64 + 1.0) * grid((*d as f64).sqrt(), delta).powi(*d as i32),
        DomainModel::Polyhedron3(poly) => {
            let cell = delta / 3f64.sqrt();
            let area: f64 = poly
                .face_triangles()
                .map(|[a, b, c]| 0.5 * length(crate::spaces::cross(sub(b, a), sub(c, a))))
                .sum();
            poly.volume() / cell.powi(3) + 2.0 * area / (0.75 * delta * delta)
        }
        DomainModel::Cantor { depth } => {
            let level = ((1.0 / (2.0 * delta)).ln() / 3f64.ln()).ceil().clamp(0.0, *depth as f64);
            2f64.powf(level + 1.0)
        }
    }
}

fn segment_grid(a: f64, b: f64, delta: f64) -> Result<(PointSet, f64)> {
    let n = steps(b - a, 2.0 * delta)?;
    let h = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + k as f64 * h }).collect();
    Ok((PointSet::from_scalars(&values), h / 2.0))
}

fn polyline_grid(line: &Polyline, delta: f64) -> Result<(PointSet, f64)> {
    let dim = line.dim();
    let mut points = PointSet::new(dim);
    let mut mesh = 0.0f64;
    points.push(&line.vertices()[0]);
    for e in 0..line.edge_count() {
        let (a, b) = line.edge(e);
        let n = steps(line.edge_length(e), 2.0 * delta)?;
        mesh = mesh.max(line.edge_length(e) / (2 * n) as f64);
        for k in 1..=n {
            if k == n {
                points.push(b);
            } else {
                let t = k as f64 / n as f64;
                let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                points.push(&p);
            }
        }
    }
    Ok((points, mesh))
}

/// Calls `f` with the centre of every cell of the `n^d` grid on `[lo, hi]^d`.
fn for_each_cell_centre(d: usize, n: usize, lo: f64, hi: f64, mut f: impl FnMut(&[f64])) {
    let h = (hi - lo) / n as f64;
    let mut idx = vec![0usize; d];
    let mut p: Vec<f64> = vec![lo + 0.5 * h; d];
    loop {
        f(&p);
        let mut a = d;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < n {
                p[a] = lo + (idx[a] as f64 + 0.5) * h;
                break;
            }
            idx[a] = 0;
            p[a] = lo + 0.5 * h;
        }
    }
}

fn cube_grid(d: usize, delta: f64) -> Result<(PointSet, f64)> {
    let root = (d as f64).sqrt();
    let n = steps(root, 2.0 * delta)?;
    check_count((n as f64).powi(d as i32))?;
    let mut points = PointSet::with_capacity(d, n.pow(d as u32));
    for_each_cell_centre(d, n, 0.0, 1.0, |p| points.push(p));
    Ok((points, root / (2 * n) as f64))
}

fn ball_grid(d: usize, delta: f64) -> Result<(PointSet, f64)> {
    let root = (d as f64).sqrt();
    let n = steps(root, delta)?;
    check_count((n as f64).powi(d as i32))?;
    let h = 2.0 / n as f64;
    let mut points = PointSet::new(d);
    let mut q = vec![0.0; d];
    for_each_cell_centre(d, n, -1.0, 1.0, |c| {
        // squared distance from the origin to the closed cell
        let gap2: f64 = c.iter().map(|x| (x.abs() - h / 2.0).max(0.0).powi(2)).sum();
        if gap2 > 1.0 {
            return;
        }
        let r = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1.0 {
            for (qa, ca) in q.iter_mut().zip(c) {
                *qa = ca / r;
            }
            points.push(&q);
        } else {
            points.push(c);
        }
    });
    Ok((points, root / n as f64))
}

fn circle_grid(delta: f64) -> Result<(PointSet, f64)> {
    let n = steps(std::f64::consts::PI, delta)?.max(3);
    let mut points = PointSet::with_capacity(2, n);
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        points.push(&[t.cos(), t.sin()]);
    }
    let half_arc = std::f64::consts::PI / n as f64;
    Ok((points, 2.0 * (half_arc / 2.0).sin()))
}

fn sphere_grid(d: usize, delta: f64) -> Result<(PointSet, f64)> {
    let root = (d as f64).sqrt();
    let n = steps(root, delta)?;
    let faces = 2 * (d + 1);
    check_count(faces as f64 * (n as f64).powi(d as i32))?;
    let mut points = PointSet::with_capacity(d + 1, faces * n.pow(d as u32));
    let mut x = vec![0.0; d + 1];
    for axis in 0..=d {
        for sign in [-1.0, 1.0] {
            for_each_cell_centre(d, n, -1.0, 1.0, |c| {
                let mut k = 0;
                for (a, xa) in x.iter_mut().enumerate() {
                    if a == axis {
                        *xa = sign;
                    } else {
                        *xa = c[k];
                        k += 1;
                    }
                }
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= r);
                points.push(&x);
            });
        }
    }
    Ok((points, root / n as f64))
}

fn polyhedron_grid(poly: &Polyhedron, delta: f64) -> Result<(PointSet, f64)> {
    let half = delta / 2.0;
    let (lo, hi) = poly.bounding_box();
    let cell = 2.0 * half / 3f64.sqrt();
    let shape: Vec<usize> = (0..3).map(|a| steps(hi[a] - lo[a], cell)).collect::<Result<_>>()?;
    check_count(shape.iter().map(|&s| s as f64).product())?;
    let mut points = PointSet::new(3);
    let tets: Vec<[Vec3; 4]> = (0..poly.tetrahedra().len()).map(|i| poly.tet_vertices(i)).collect();
    let size: Vec<f64> = (0..3).map(|a| (hi[a] - lo[a]) / shape[a] as f64).collect();
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            for k in 0..shape[2] {
                let c = [
                    lo[0] + (i as f64 + 0.5) * size[0],
                    lo[1] + (j as f64 + 0.5) * size[1],
                    lo[2] + (k as f64 + 0.5) * size[2],
                ];
                if tets.iter().any(|t| crate::spaces::tet_contains(*t, c, 0.0)) {
                    points.push(&c);
                }
            }
        }
    }
    // Cells are no larger than requested, so their half diagonal is ≤ δ/2.
    let interior = 0.5 * size.iter().map(|s| s * s).sum::<f64>().sqrt();
    let mut boundary = 0.0f64;
    for [a, b, c] in poly.face_triangles() {
        let longest = length(sub(a, b)).max(length(sub(b, c))).max(length(sub(c, a)));
        let k = steps(longest, half * 3f64.sqrt())?;
        boundary = boundary.max(longest / (k as f64 * 3f64.sqrt()));
        for i in 0..=k {
            for j in 0..=k - i {
                let (u, v) = (i as f64 / k as f64, j as f64 / k as f64);
                let w = 1.0 - u - v;
                let p: Vec<f64> = (0..3).map(|t| w * a[t] + u * b[t] + v * c[t]).collect();
                points.push(&p);
            }
        }
    }
    check_count(points.len() as f64)?;
    Ok((points, interior + boundary))
}

fn cantor_grid(depth: u32, delta: f64) -> Result<(PointSet, f64)> {
    let mut level = 0u32;
    let mut width = 1.0f64;
    while width / 2.0 > delta && level < depth {
        level += 1;
        width /= 3.0;
    }
    check_count(2f64.powi(level as i32 + 1))?;
    let mut lefts = vec![0.0f64];
    let mut w = 1.0f64;
    for _ in 0..level {
        w /= 3.0;
        lefts = lefts.iter().flat_map(|&l| [l, l + 2.0 * w]).collect();
    }
    let mut values = Vec::with_capacity(2 * lefts.len());
    for &l in &lefts {
        values.push(l);
        values.push(l + w);
    }
    let mesh = if level == depth { w / 2.0 } else { width / 2.0 };
    Ok((PointSet::from_scalars(&values), mesh.max(f64::MIN_POSITIVE)))
}

/// Greedy maximal subset of `pool` with pairwise distances `≥ separation`,
/// scanning the pool in order. Every pool point lies within `separation`
/// of the result. Returns the chosen pool indices.
pub fn greedy_separated_indices(pool: &PointSet, separation: f64) -> Result<Vec<usize>> {
    if !(separation.is_finite() && separation > 0.0) {
        return invalid(format!("separation must be positive, got {separation}"));
    }
    let dim = pool.dim();
    let s2 = separation * separation;
    let mut cells: std::collections::HashMap<Vec<i64>, Vec<usize>> = std::collections::HashMap::new();
    let mut chosen = Vec::new();
    let mut key = vec![0i64; dim];
    let mut probe = vec![0i64; dim];
    'pool: for (i, p) in pool.iter().enumerate() {
        for a in 0..dim {
            key[a] = (p[a] / separation).floor() as i64;
        }
        // scan the 3^dim neighbouring cells
        let mut offset = vec![-1i64; dim];
        loop {
            for a in 0..dim {
                probe[a] = key[a] + offset[a];
            }
            if let Some(members) = cells.get(&probe) {
                if members.iter().any(|&j| dist2(p, pool.get(j)) < s2) {
                    continue 'pool;
                }
            }
            let mut a = 0;
            while a < dim && offset[a] == 1 {
                offset[a] = -1;
                a += 1;
            }
            if a == dim {
                break;
            }
            offset[a] += 1;
        }
        cells.entry(key.clone()).or_default().push(i);
        chosen.push(i);
    }
    Ok(chosen)
}

/// Points of [`greedy_separated_indices`].
pub fn greedy_separated_net(pool: &PointSet, separation: f64) -> Result<PointSet> {
    let chosen = greedy_separated_indices(pool, separation)?;
    let mut out = PointSet::with_capacity(pool.dim(), chosen.len());
    for i in chosen {
        out.push(pool.get(i));
    }
    Ok(out)
}

/// Maximal `separation`-separated net of `domain` drawn from a probe net at
/// mesh `separation / 4`; its certified mesh is `5/4 · separation`.
pub fn greedy_domain_net(domain: &DomainModel, separation: f64) -> Result<ProbeNet> {
    let pool = build_probe_net(domain, separation / 4.0)?;
    let points = greedy_separated_net(&pool.points, separation)?;
    Ok(ProbeNet { domain: domain.clone(), points, certified_mesh: separation + pool.certified_mesh })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample, SeedSpec};

    fn check_mesh(domain: &DomainModel, delta: f64, samples: usize) {
        let net = build_probe_net(domain, delta).unwrap();
        assert!(net.certified_mesh <= delta && net.certified_mesh > 0.0);
        assert!(net.points.iter().all(|p| domain.contains(p, 1e-12)), "{}", domain.name());
        let idx = SpatialIndex::build(&net.points).unwrap();
        let ys = sample(domain, samples, SeedSpec::new(99, 0)).unwrap();
        for y in ys.points.iter() {
            let (_, d) = idx.nearest(y);
            assert!(d <= net.certified_mesh, "{}: {d} > {}", domain.name(), net.certified_mesh);
        }
    }

    #[test]
    fn interval_example() {
        let net = build_probe_net(&DomainModel::interval(), 0.125).unwrap();
        assert_eq!(net.points.flat(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(net.certified_mesh, 0.125);
    }

    #[test]
    fn circle_example() {
        let net = build_probe_net(&DomainModel::sphere(1).unwrap(), 0.2).unwrap();
        assert!(net.len() <= (2.0 * std::f64::consts::PI / 0.2).ceil() as usize + 4);
        assert!(net.certified_mesh <= 0.2);
    }

    #[test]
    fn square_example() {
        let net = build_probe_net(&DomainModel::cube(2).unwrap(), 0.1).unwrap();
        assert!(net.certified_mesh <= 0.1);
        let n = (net.len() as f64).sqrt();
        assert!((net.certified_mesh - 2f64.sqrt() / (2.0 * n)).abs() < 1e-15);
    }

    #[test]
    fn certified_mesh_holds_on_samples() {
        let cases = [
            (DomainModel::interval(), 0.01),
            (DomainModel::arcsine(), 0.01),
            (DomainModel::sphere(1).unwrap(), 0.01),
            (DomainModel::sphere(2).unwrap(), 0.05),
            (DomainModel::sphere(3).unwrap(), 0.3),
            (DomainModel::ball(1).unwrap(), 0.02),
            (DomainModel::ball(2).unwrap(), 0.03),
            (DomainModel::ball(3).unwrap(), 0.1),
            (DomainModel::cube(1).unwrap(), 0.01),
            (DomainModel::cube(2).unwrap(), 0.03),
            (DomainModel::cube(3).unwrap(), 0.08),
            (DomainModel::polyline(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap(), 0.01),
            (DomainModel::polyhedron(Polyhedron::unit_box()), 0.1),
            (DomainModel::polyhedron(Polyhedron::regular_tetrahedron()), 0.2),
            (DomainModel::polyhedron(Polyhedron::l_prism()), 0.2),
            (DomainModel::cantor(40).unwrap(), 0.001),
        ];
        for (domain, delta) in cases {
            check_mesh(&domain, delta, 10_000);
        }
    }

    #[test]
    fn size_estimate_tracks_built_nets() {
        let cases = [
            (DomainModel::interval(), 0.01),
            (DomainModel::sphere(1).unwrap(), 0.01),
            (DomainModel::sphere(2).unwrap(), 0.02),
            (DomainModel::ball(2).unwrap(), 0.01),
            (DomainModel::cube(3).unwrap(), 0.05),
            (DomainModel::polyhedron(Polyhedron::unit_box()), 0.1),
            (DomainModel::cantor(40).unwrap(), 1e-3),
        ];
        for (domain, delta) in cases {
            let built = build_probe_net(&domain, delta).unwrap().len() as f64;
            let est = probe_net_size(&domain, delta);
            assert!(est > 0.5 * built && est < 2.0 * built, "{}: {est} vs {built}", domain.name());
        }
    }

    #[test]
    fn invalid_mesh() {
        assert!(build_probe_net(&DomainModel::interval(), 0.0).is_err());
        assert!(build_probe_net(&DomainModel::interval(), f64::NAN).is_err());
        assert!(matches!(
            build_probe_net(&DomainModel::cube(3).unwrap(), 1e-4),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn greedy_line_example() {
        let pool = PointSet::from_scalars(&[0.0, 0.05, 1.0]);
        assert_eq!(greedy_separated_net(&pool, 0.1).unwrap().flat(), &[0.0, 1.0]);
        assert_eq!(greedy_separated_net(&pool, 2.0).unwrap().len(), 1);
    }

    #[test]
    fn greedy_is_separated_and_maximal() {
        let pool = sample(&DomainModel::cube(2).unwrap(), 10_000, SeedSpec::new(4, 0)).unwrap().points;
        let net = greedy_separated_net(&pool, 0.05).unwrap();
        assert!((100..=484).contains(&net.len()), "{}", net.len());
        for (i, p) in net.iter().enumerate() {
            for q in net.iter().skip(i + 1) {
                assert!(dist2(p, q) >= 0.05 * 0.05);
            }
        }
        let idx = SpatialIndex::build(&net).unwrap();
        assert!(pool.iter().all(|p| idx.nearest(p).1 < 0.05));
    }

    #[test]
    fn greedy_net_cardinality_sandwich() {
        // Covering at radius 5/(4n) forces card ≥ 16 n² / (25π); disjoint
        // balls of radius 1/(2n) inside the 1/(2n)-enlarged square force
        // card ≤ 4 (n + 1)² / π, below the (1 + √2)² n² covering bound.
        let cube = DomainModel::cube(2).unwrap();
        for n in [5.0, 10.0, 20.0] {
            let net = greedy_domain_net(&cube, 1.0 / n).unwrap();
            let card = net.len() as f64;
            let lower = 16.0 * n * n / (25.0 * std::f64::consts::PI);
            let upper = 4.0 * (n + 1.0) * (n + 1.0) / std::f64::consts::PI;
            assert!(upper <= (1.0 + 2f64.sqrt()).powi(2) * n * n);
            assert!(card >= lower && card <= upper, "n={n}: {card}");
        }
    }

    #[test]
    fn export_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.bin");
        let net = build_probe_net(&DomainModel::sphere(2).unwrap(), 0.5).unwrap();
        net.export(&path).unwrap();
        let (points, sidecar) = crate::sampler::read_binary(&path).unwrap();
        assert_eq!(points, net.points);
        assert_eq!(sidecar.certified_mesh, Some(net.certified_mesh));
        assert_eq!(sidecar.seed, None);
    }
}
