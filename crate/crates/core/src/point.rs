use serde::{Deserialize, Serialize};

/// A single point in ambient Euclidean coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A flat, row-major store of points sharing one ambient dimension.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "point dimension must be positive");
        PointSet { dim, coords: Vec::new() }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        assert!(dim > 0, "point dimension must be positive");
        PointSet { dim, coords: Vec::with_capacity(dim * n) }
    }

    /// Wraps a flat coordinate buffer. Panics if the length is not a
    /// multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim), "ragged coordinate buffer");
        PointSet { dim, coords }
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Self {
        let mut set = PointSet::with_capacity(dim, points.len());
        for p in points {
            set.push(p.as_ref());
        }
        set
    }

    /// Convenience for one-dimensional sets.
    pub fn from_scalars(values: &[f64]) -> Self {
        PointSet { dim: 1, coords: values.to_vec() }
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.iter().map(|p| Point::new(p.to_vec())).collect()
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> PointSet {
        PointSet { dim: self.dim, coords: self.coords.iter().map(|c| c * factor).collect() }
    }

    pub fn extend(&mut self, other: &PointSet) {
        assert_eq!(self.dim, other.dim, "point dimension mismatch");
        self.coords.extend_from_slice(&other.coords);
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
