use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::dist;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylineSpec {
    pub vertices: Vec<Vec<f64>>,
}

/// An open polygonal curve in R^D traversed in vertex order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolylineSpec", into = "PolylineSpec")]
pub struct Polyline {
    vertices: Vec<Vec<f64>>,
    /// Arclength at each vertex; `cumulative[0] == 0`.
    cumulative: Vec<f64>,
}

impl TryFrom<PolylineSpec> for Polyline {
    type Error = Error;

    fn try_from(spec: PolylineSpec) -> Result<Self> {
        Polyline::new(spec.vertices)
    }
}

impl From<Polyline> for PolylineSpec {
    fn from(p: Polyline) -> Self {
        PolylineSpec { vertices: p.vertices }
    }
}

impl Polyline {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidGeometry("a polyline needs at least two vertices".into()));
        }
        let dim = vertices[0].len();
        if dim == 0 || vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidGeometry("polyline vertices must share a positive dimension".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite polyline vertex".into()));
        }
        let mut cumulative = vec![0.0];
        for w in vertices.windows(2) {
            let len = dist(&w[0], &w[1]);
            if len <= 0.0 {
                return Err(Error::InvalidGeometry("consecutive polyline vertices coincide".into()));
            }
            cumulative.push(cumulative.last().unwrap() + len);
        }
        Ok(Polyline { vertices, cumulative })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edge(&self, i: usize) -> (&[f64], &[f64]) {
        (&self.vertices[i], &self.vertices[i + 1])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.cumulative[i + 1] - self.cumulative[i]
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub(crate) fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(dist(&v[i], &v[j]));
            }
        }
        best
    }

    /// Distance from `p` to the nearest point of the curve.
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                let len2: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
                let t: f64 = a.iter().zip(b).zip(p).map(|((x, y), q)| (q - x) * (y - x)).sum::<f64>() / len2;
                let t = t.clamp(0.0, 1.0);
                let proj: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                dist(&proj, p)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Polyline::new(self.vertices.iter().map(|v| v.iter().map(|c| c * factor).collect()).collect())
    }
}
