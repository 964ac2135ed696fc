//! Exact nearest-neighbour search on a dense uniform grid.
//!
//! Points are bucketed into cubic cells of side `cell_size` laid over their
//! bounding box and stored cell by cell. A query scans rings of cells at
//! growing Chebyshev distance from its own cell and stops once every
//! unscanned cell is farther than the best candidate.

use crate::error::{invalid, Result};
use crate::point::{dist2, PointSet};

/// Upper bound on the number of grid cells, as a multiple of the point count.
const CELLS_PER_POINT: usize = 8;
const MIN_CELL_CAP: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct SpatialIndex {
    dim: usize,
    cell_size: f64,
    origin: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    /// `cell_start[c]..cell_start[c + 1]` indexes `sorted` for cell `c`.
    cell_start: Vec<u32>,
    /// Point indices in cell order, ascending within each cell.
    sorted: Vec<u32>,
    /// Coordinates in `sorted` order.
    sorted_coords: Vec<f64>,
    points: PointSet,
}

impl SpatialIndex {
    /// Builds an index with a cell size giving a few points per cell.
    pub fn build(points: &PointSet) -> Result<Self> {
        if points.is_empty() {
            return invalid("cannot index an empty point set");
        }
        let (lo, hi) = bounds(points);
        let live: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).filter(|e| *e > 0.0).collect();
        let cell = if live.is_empty() {
            1.0
        } else {
            let volume: f64 = live.iter().product();
            (2.0 * volume / points.len() as f64).powf(1.0 / live.len() as f64)
        };
        Self::with_cell_size(points, cell)
    }

    /// Builds an index with the requested cell size; the size is enlarged
    /// when the grid would exceed its cell budget.
    pub fn with_cell_size(points: &PointSet, cell_size: f64) -> Result<Self> {
        if points.is_empty() {
            return invalid("cannot index an empty point set");
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return invalid(format!("cell size must be positive, got {cell_size}"));
        }
        if points.flat().iter().any(|c| !c.is_finite()) {
            return invalid("points must have finite coordinates");
        }
        if points.len() > u32::MAX as usize {
            return invalid("too many points for the index");
        }
        let dim = points.dim();
        let (lo, hi) = bounds(points);
        let cap = (CELLS_PER_POINT * points.len()).max(MIN_CELL_CAP);
        let mut cell = cell_size;
        let mut shape = grid_shape(&lo, &hi, cell);
        while shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).is_none_or(|c| c > cap) {
            cell *= 1.5;
            shape = grid_shape(&lo, &hi, cell);
        }
        let mut strides = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        let n_cells: usize = shape.iter().product();

        let mut index = SpatialIndex {
            dim,
            cell_size: cell,
            origin: lo,
            shape,
            strides,
            cell_start: Vec::new(),
            sorted: Vec::new(),
            sorted_coords: Vec::new(),
            points: points.clone(),
        };
        let cells: Vec<usize> = points.iter().map(|p| index.cell_of(p)).collect();
        let mut counts = vec![0u32; n_cells + 1];
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..n_cells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut sorted = vec![0u32; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            sorted[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        let mut sorted_coords = Vec::with_capacity(points.flat().len());
        for &i in &sorted {
            sorted_coords.extend_from_slice(points.get(i as usize));
        }
        index.cell_start = counts;
        index.sorted = sorted;
        index.sorted_coords = sorted_coords;
        Ok(index)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    fn axis_cell(&self, a: usize, x: f64) -> usize {
        let k = ((x - self.origin[a]) / self.cell_size).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.shape[a] - 1)
        }
    }

    fn cell_of(&self, p: &[f64]) -> usize {
        (0..self.dim).map(|a| self.axis_cell(a, p[a]) * self.strides[a]).sum()
    }

    /// Nearest stored point to `q` as `(index, distance)`. Ties go to the
    /// lowest index.
    pub fn nearest(&self, q: &[f64]) -> (usize, f64) {
        let (i, d2) = self.nearest_squared(q);
        (i, d2.sqrt())
    }

    /// Like [`nearest`](Self::nearest) with the squared distance.
    pub fn nearest_squared(&self, q: &[f64]) -> (usize, f64) {
        assert_eq!(q.len(), self.dim, "query dimension mismatch");
        let home: Vec<usize> = (0..self.dim).map(|a| self.axis_cell(a, q[a])).collect();
        let max_ring = (0..self.dim)
            .map(|a| home[a].max(self.shape[a] - 1 - home[a]))
            .max()
            .unwrap_or(0);
        let mut best = (usize::MAX, f64::INFINITY);
        let mut cursor = vec![0usize; self.dim];
        for ring in 0..=max_ring {
            self.scan_ring(q, &home, ring, 0, false, &mut cursor, &mut best);
            // Unscanned cells are at least `ring` whole cells away.
            let reach = ring as f64 * self.cell_size;
            if best.1 < reach * reach {
                break;
            }
        }
        best
    }

    /// Visits cells whose Chebyshev index distance from `home` is `ring`.
    #[allow(clippy::too_many_arguments)]
    fn scan_ring(
        &self,
        q: &[f64],
        home: &[usize],
        ring: usize,
        axis: usize,
        on_shell: bool,
        cursor: &mut [usize],
        best: &mut (usize, f64),
    ) {
        if axis == self.dim {
            if on_shell || ring == 0 {
                let cell: usize = cursor.iter().zip(&self.strides).map(|(c, s)| c * s).sum();
                self.scan_cell(q, cell, best);
            }
            return;
        }
        let lo = home[axis].saturating_sub(ring);
        let hi = (home[axis] + ring).min(self.shape[axis] - 1);
        let remaining_free = axis + 1 < self.dim;
        for c in lo..=hi {
            let edge = c.abs_diff(home[axis]) == ring;
            if !edge && !on_shell && !remaining_free && ring > 0 {
                continue;
            }
            cursor[axis] = c;
            self.scan_ring(q, home, ring, axis + 1, on_shell || edge, cursor, best);
        }
    }

    fn scan_cell(&self, q: &[f64], cell: usize, best: &mut (usize, f64)) {
        let (start, end) = (self.cell_start[cell] as usize, self.cell_start[cell + 1] as usize);
        for slot in start..end {
            let p = &self.sorted_coords[slot * self.dim..(slot + 1) * self.dim];
            let d2 = dist2(q, p);
            let i = self.sorted[slot] as usize;
            if d2 < best.1 || (d2 == best.1 && i < best.0) {
                *best = (i, d2);
            }
        }
    }
}

fn bounds(points: &PointSet) -> (Vec<f64>, Vec<f64>) {
    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points.iter() {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}

fn grid_shape(lo: &[f64], hi: &[f64], cell: f64) -> Vec<usize> {
    lo.iter()
        .zip(hi)
        .map(|(a, b)| {
            let k = ((b - a) / cell).floor();
            if k.is_finite() && k < 1e12 {
                k as usize + 1
            } else {
                usize::MAX / 2
            }
        })
        .collect()
}

/// Exhaustive nearest-neighbour scan with the same tie rule as the index.
pub fn brute_force_nearest(points: &PointSet, q: &[f64]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d2 = dist2(q, p);
        if d2 < best.1 {
            best = (i, d2);
        }
    }
    (best.0, best.1.sqrt())
}
