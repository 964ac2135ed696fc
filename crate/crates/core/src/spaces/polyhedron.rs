//! Pre-tetrahedralized polyhedra in R^3.
//!
//! A polyhedron is given by its vertices, a tetrahedral decomposition (used
//! for volume sampling and membership), its boundary faces and its edges.
//! Faces are planar convex polygons listed counter-clockwise when seen from
//! outside, so the right-hand rule gives the outward normal. Every edge names
//! its two endpoint vertices and the two faces meeting along it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub(crate) fn length(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub vertices: [usize; 2],
    pub faces: [usize; 2],
}

/// Serialized form of a polyhedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronSpec {
    pub vertices: Vec<Vec3>,
    pub tetrahedra: Vec<[usize; 4]>,
    pub faces: Vec<Vec<usize>>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronSpec", into = "PolyhedronSpec")]
pub struct Polyhedron {
    spec: PolyhedronSpec,
    tet_volumes: Vec<f64>,
    /// Running sums of `tet_volumes`, last entry equals `volume`.
    tet_cumulative: Vec<f64>,
    volume: f64,
    normals: Vec<Vec3>,
}

const VOLUME_REL_TOL: f64 = 1e-9;

impl TryFrom<PolyhedronSpec> for Polyhedron {
    type Error = Error;

    fn try_from(spec: PolyhedronSpec) -> Result<Self> {
        Polyhedron::new(spec)
    }
}

impl From<Polyhedron> for PolyhedronSpec {
    fn from(p: Polyhedron) -> Self {
        p.spec
    }
}

fn geometry<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidGeometry(msg.into()))
}

/// Newell's method; the length of the returned vector is twice the polygon
/// area.
fn newell_normal(vertices: &[Vec3], face: &[usize]) -> Vec3 {
    let mut n = [0.0; 3];
    for (i, &a) in face.iter().enumerate() {
        let p = vertices[a];
        let q = vertices[face[(i + 1) % face.len()]];
        n[0] += (p[1] - q[1]) * (p[2] + q[2]);
        n[1] += (p[2] - q[2]) * (p[0] + q[0]);
        n[2] += (p[0] - q[0]) * (p[1] + q[1]);
    }
    n
}

pub(crate) fn tet_signed_volume(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0
}

/// Position of the directed edge `a -> b` in the boundary cycle of `face`:
/// `Some(true)` if the face traverses it as `a -> b`, `Some(false)` for
/// `b -> a`, `None` if the vertices are not consecutive.
fn edge_direction(face: &[usize], a: usize, b: usize) -> Option<bool> {
    let k = face.len();
    for i in 0..k {
        let (u, v) = (face[i], face[(i + 1) % k]);
        if u == a && v == b {
            return Some(true);
        }
        if u == b && v == a {
            return Some(false);
        }
    }
    None
}

impl Polyhedron {
    pub fn new(spec: PolyhedronSpec) -> Result<Self> {
        let nv = spec.vertices.len();
        if nv < 4 {
            return geometry("a polyhedron needs at least 4 vertices");
        }
        if spec.vertices.iter().flatten().any(|c| !c.is_finite()) {
            return geometry("non-finite vertex coordinate");
        }
        if spec.tetrahedra.is_empty() || spec.faces.len() < 4 || spec.edges.is_empty() {
            return geometry("tetrahedra, faces and edges must be populated");
        }
        let in_range = |i: &usize| *i < nv;
        if !spec.tetrahedra.iter().flatten().all(in_range)
            || !spec.faces.iter().flatten().all(in_range)
            || !spec.edges.iter().flat_map(|e| e.vertices.iter()).all(in_range)
        {
            return geometry("vertex index out of range");
        }

        let mut tet_volumes = Vec::with_capacity(spec.tetrahedra.len());
        for (i, t) in spec.tetrahedra.iter().enumerate() {
            let v = tet_signed_volume(
                spec.vertices[t[0]],
                spec.vertices[t[1]],
                spec.vertices[t[2]],
                spec.vertices[t[3]],
            )
            .abs();
            if v <= 0.0 {
                return geometry(format!("tetrahedron {i} has zero volume"));
            }
            tet_volumes.push(v);
        }
        let mut acc = 0.0;
        let tet_cumulative: Vec<f64> = tet_volumes
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        let volume = acc;

        let mut normals = Vec::with_capacity(spec.faces.len());
        let mut boundary_volume = 0.0;
        for (fi, face) in spec.faces.iter().enumerate() {
            if face.len() < 3 {
                return geometry(format!("face {fi} has fewer than 3 vertices"));
            }
            let n = newell_normal(&spec.vertices, face);
            let len = length(n);
            if !(len > 0.0) {
                return geometry(format!("face {fi} has a degenerate normal"));
            }
            let unit = [n[0] / len, n[1] / len, n[2] / len];
            let p0 = spec.vertices[face[0]];
            let scale = face.iter().map(|&v| length(sub(spec.vertices[v], p0))).fold(0.0, f64::max);
            for w in face.windows(2).skip(1) {
                let (p1, p2) = (spec.vertices[w[0]], spec.vertices[w[1]]);
                let tri = cross(sub(p1, p0), sub(p2, p0));
                if dot(tri, unit) < -1e-12 * scale * scale {
                    return geometry(format!("face {fi} is not convex"));
                }
                boundary_volume += dot(p0, tri) / 6.0;
            }
            if face.iter().any(|&v| dot(sub(spec.vertices[v], p0), unit).abs() > 1e-9 * scale.max(1.0)) {
                return geometry(format!("face {fi} is not planar"));
            }
            normals.push(unit);
        }
        if !(boundary_volume > 0.0) {
            return geometry("faces are not oriented outward (boundary volume is not positive)");
        }
        if ((boundary_volume - volume) / volume).abs() > VOLUME_REL_TOL {
            return geometry(format!(
                "tetrahedra volume {volume} disagrees with boundary volume {boundary_volume}"
            ));
        }

        for (ei, e) in spec.edges.iter().enumerate() {
            let [a, b] = e.vertices;
            let [f1, f2] = e.faces;
            if a == b || f1 == f2 || f1 >= spec.faces.len() || f2 >= spec.faces.len() {
                return geometry(format!("edge {ei} is malformed"));
            }
            match (edge_direction(&spec.faces[f1], a, b), edge_direction(&spec.faces[f2], a, b)) {
                (Some(d1), Some(d2)) if d1 != d2 => {}
                (Some(_), Some(_)) => {
                    return geometry(format!("faces of edge {ei} are inconsistently oriented"))
                }
                _ => return geometry(format!("edge {ei} is not on the boundary of both its faces")),
            }
        }

        Ok(Polyhedron { spec, tet_volumes, tet_cumulative, volume, normals })
    }

    /// Builds a polyhedron deriving the edge list from the faces. Every
    /// undirected face edge must be shared by exactly two faces.
    pub fn from_faces(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>, tetrahedra: Vec<[usize; 4]>) -> Result<Self> {
        use std::collections::BTreeMap;
        let mut seen: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, face) in faces.iter().enumerate() {
            for i in 0..face.len() {
                let (a, b) = (face[i], face[(i + 1) % face.len()]);
                seen.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
        let mut edges = Vec::with_capacity(seen.len());
        for ((a, b), fs) in seen {
            if fs.len() != 2 {
                return geometry(format!("edge ({a}, {b}) is shared by {} faces", fs.len()));
            }
            edges.push(EdgeSpec { vertices: [a, b], faces: [fs[0], fs[1]] });
        }
        Polyhedron::new(PolyhedronSpec { vertices, tetrahedra, faces, edges })
    }

    /// Axis-aligned box `[0,a] x [0,b] x [0,c]`.
    pub fn cuboid(a: f64, b: f64, c: f64) -> Result<Self> {
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [a, 0.0, 0.0],
            [a, b, 0.0],
            [0.0, b, 0.0],
            [0.0, 0.0, c],
            [a, 0.0, c],
            [a, b, c],
            [0.0, b, c],
        ];
        let faces = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![2, 3, 7, 6],
            vec![1, 2, 6, 5],
            vec![0, 4, 7, 3],
        ];
        Polyhedron::from_faces(vertices, faces, kuhn_tetrahedra([0, 1, 2, 3, 4, 5, 6, 7]))
    }

    pub fn unit_box() -> Self {
        Polyhedron::cuboid(1.0, 1.0, 1.0).expect("unit box is valid")
    }

    /// Right prism over an equilateral triangle of side `side`.
    pub fn triangular_prism(side: f64, height: f64) -> Result<Self> {
        let h = side * 3f64.sqrt() / 2.0;
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [side, 0.0, 0.0],
            [side / 2.0, h, 0.0],
            [0.0, 0.0, height],
            [side, 0.0, height],
            [side / 2.0, h, height],
        ];
        let faces = vec![
            vec![0, 2, 1],
            vec![3, 4, 5],
            vec![0, 1, 4, 3],
            vec![1, 2, 5, 4],
            vec![2, 0, 3, 5],
        ];
        let tetrahedra = vec![[0, 1, 2, 3], [1, 2, 3, 4], [2, 3, 4, 5]];
        Polyhedron::from_faces(vertices, faces, tetrahedra)
    }

    /// Regular tetrahedron with edge length `2√2` inscribed in the cube `[-1,1]^3`.
    pub fn regular_tetrahedron() -> Self {
        let vertices = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
        Polyhedron::from_faces(vertices, faces, vec![[0, 1, 2, 3]]).expect("regular tetrahedron is valid")
    }

    /// Non-convex L-shaped prism: the unit box `[0,2]x[0,1]x[0,1]` joined with
    /// `[0,1]x[1,2]x[0,1]`. Has one reflex edge.
    pub fn l_prism() -> Self {
        // bottom ring z=0: 0..6, top ring z=1: 6..12
        let ring = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let mut vertices: Vec<Vec3> = ring.iter().map(|p| [p[0], p[1], 0.0]).collect();
        vertices.extend(ring.iter().map(|p| [p[0], p[1], 1.0]));
        // extra vertex (1,0) and (0,1) are not needed for faces; the bottom and
        // top are split into two convex quads along x = 1 using vertex 3.
        vertices.push([1.0, 0.0, 0.0]); // 12
        vertices.push([1.0, 0.0, 1.0]); // 13
        vertices.push([0.0, 1.0, 0.0]); // 14
        vertices.push([0.0, 1.0, 1.0]); // 15
        let faces = vec![
            // bottom (outward -z), split into [0,1]x[0,2] and [1,2]x[0,1]
            vec![0, 14, 5, 4, 3, 12],
            vec![12, 3, 2, 1],
            // top (outward +z)
            vec![6, 13, 9, 10, 11, 15],
            vec![13, 7, 8, 9],
            // sides
            vec![0, 12, 13, 6],
            vec![12, 1, 7, 13],
            vec![1, 2, 8, 7],
            vec![2, 3, 9, 8],
            vec![3, 4, 10, 9],
            vec![4, 5, 11, 10],
            vec![5, 14, 15, 11],
            vec![14, 0, 6, 15],
        ];
        let mut tetrahedra = kuhn_tetrahedra([0, 12, 3, 14, 6, 13, 9, 15]);
        tetrahedra.extend(kuhn_tetrahedra([12, 1, 2, 3, 13, 7, 8, 9]));
        tetrahedra.extend(kuhn_tetrahedra([14, 3, 4, 5, 15, 9, 10, 11]));
        Polyhedron::from_faces(vertices, faces, tetrahedra).expect("L prism is valid")
    }

    pub fn spec(&self) -> &PolyhedronSpec {
        &self.spec
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.spec.vertices
    }

    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.spec.tetrahedra
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.spec.faces
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.spec.edges
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn tet_volumes(&self) -> &[f64] {
        &self.tet_volumes
    }

    pub(crate) fn tet_cumulative(&self) -> &[f64] {
        &self.tet_cumulative
    }

    pub fn tet_vertices(&self, i: usize) -> [Vec3; 4] {
        let t = self.spec.tetrahedra[i];
        t.map(|v| self.spec.vertices[v])
    }

    pub fn outward_normal(&self, face: usize) -> Vec3 {
        self.normals[face]
    }

    /// Fan triangulation of each (convex) face.
    pub fn face_triangles(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        self.spec.faces.iter().flat_map(move |f| {
            let p0 = self.spec.vertices[f[0]];
            f.windows(2).skip(1).map(move |w| [p0, self.spec.vertices[w[0]], self.spec.vertices[w[1]]])
        })
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.spec.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(length(sub(v[i], v[j])));
            }
        }
        best
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.spec.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Membership through the tetrahedral decomposition, with barycentric
    /// slack `tol` relative to each tetrahedron's size.
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        (0..self.spec.tetrahedra.len()).any(|i| tet_contains(self.tet_vertices(i), p, tol))
    }

    /// Interior dihedral angle along each edge, in `(0, 2π)`.
    pub fn dihedral_angles(&self) -> Vec<f64> {
        self.spec
            .edges
            .iter()
            .map(|e| {
                let [a, b] = e.vertices;
                let [f1, f2] = e.faces;
                let forward = edge_direction(&self.spec.faces[f1], a, b).expect("validated edge");
                let (from, to) = if forward { (a, b) } else { (b, a) };
                let dir = sub(self.spec.vertices[to], self.spec.vertices[from]);
                let (n1, n2) = (self.normals[f1], self.normals[f2]);
                let between = dot(n1, n2).clamp(-1.0, 1.0).acos();
                if dot(cross(n1, n2), dir) >= 0.0 {
                    std::f64::consts::PI - between
                } else {
                    std::f64::consts::PI + between
                }
            })
            .collect()
    }

    /// Smallest interior dihedral angle over all edges.
    pub fn min_dihedral_angle(&self) -> f64 {
        self.dihedral_angles().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        for v in &mut spec.vertices {
            for c in v.iter_mut() {
                *c *= factor;
            }
        }
        Polyhedron::new(spec)
    }
}

/// Six tetrahedra around the main diagonal of a hexahedron whose corners are
/// given in the order `[x0y0z0, x1y0z0, x1y1z0, x0y1z0, x0y0z1, x1y0z1, x1y1z1, x0y1z1]`.
fn kuhn_tetrahedra(c: [usize; 8]) -> Vec<[usize; 4]> {
    vec![
        [c[0], c[1], c[2], c[6]],
        [c[0], c[2], c[3], c[6]],
        [c[0], c[3], c[7], c[6]],
        [c[0], c[7], c[4], c[6]],
        [c[0], c[4], c[5], c[6]],
        [c[0], c[5], c[1], c[6]],
    ]
}

pub(crate) fn tet_contains(t: [Vec3; 4], p: Vec3, tol: f64) -> bool {
    let total = tet_signed_volume(t[0], t[1], t[2], t[3]);
    let bary = [
        tet_signed_volume(p, t[1], t[2], t[3]),
        tet_signed_volume(t[0], p, t[2], t[3]),
        tet_signed_volume(t[0], t[1], p, t[3]),
        tet_signed_volume(t[0], t[1], t[2], p),
    ];
    bary.iter().all(|b| b / total >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn box_volume_and_right_angles() {
        let b = Polyhedron::unit_box();
        assert!((b.volume() - 1.0).abs() < 1e-15);
        for a in b.dihedral_angles() {
            assert!((a - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prism_min_angle_is_sixty_degrees() {
        let p = Polyhedron::triangular_prism(1.0, 2.0).unwrap();
        assert!((p.min_dihedral_angle() - PI / 3.0).abs() < 1e-12);
        assert!((p.volume() - 3f64.sqrt() / 4.0 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tetrahedron_dihedral() {
        let t = Polyhedron::regular_tetrahedron();
        let expected = (1.0f64 / 3.0).acos();
        for a in t.dihedral_angles() {
            assert!((a - expected).abs() < 1e-12);
        }
        assert!((t.volume() - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn l_prism_has_reflex_edge() {
        let l = Polyhedron::l_prism();
        assert!((l.volume() - 3.0).abs() < 1e-12);
        let angles = l.dihedral_angles();
        assert!(angles.iter().any(|a| (a - 1.5 * PI).abs() < 1e-12));
        assert!(angles.iter().any(|a| (a - PI).abs() < 1e-12), "coplanar split faces meet at π");
        assert!((l.min_dihedral_angle() - PI / 2.0).abs() < 1e-12);
        assert!(l.contains([0.5, 1.5, 0.5], 1e-12));
        assert!(!l.contains([1.5, 1.5, 0.5], 1e-12));
    }

    #[test]
    fn inverted_faces_rejected() {
        let b = Polyhedron::unit_box();
        let mut spec = b.spec().clone();
        for f in &mut spec.faces {
            f.reverse();
        }
        assert!(matches!(Polyhedron::new(spec), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn volume_mismatch_rejected() {
        let b = Polyhedron::unit_box();
        let mut spec = b.spec().clone();
        spec.tetrahedra.pop();
        assert!(matches!(Polyhedron::new(spec), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn degenerate_face_rejected() {
        let b = Polyhedron::unit_box();
        let mut spec = b.spec().clone();
        spec.faces[0] = vec![0, 1, 0];
        assert!(matches!(Polyhedron::new(spec), Err(Error::InvalidGeometry(_))));
    }
}
