//! Nested dyadic grid families `F_n` and the subdivision of maps along them.

use crate::geometry::{Point, Polygon};
use crate::pamap::{AffineCell, PAMap};
use serde::Serialize;

/// Squares of side `side` anchored at `origin`, clipped to the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFamily {
    pub n: usize,
    pub side: f64,
    pub origin: Point,
    /// Column and row counts.
    pub dims: (usize, usize),
    /// Clipped cells with their `(column, row)`.
    pub cells: Vec<(usize, usize, Polygon)>,
}

/// Side at level `n`: the largest power of two not above `min(1/(n√2), side(n−1)/2)`.
pub fn grid_side(n: usize) -> f64 {
    let mut s: f64 = 2.0;
    for k in 1..=n.max(1) {
        let cap = (1.0 / (k as f64 * std::f64::consts::SQRT_2)).min(0.5 * s);
        s = 2f64.powi(cap.log2().floor() as i32);
    }
    s
}

pub fn grid_family(domain: &Polygon, n: usize) -> GridFamily {
    let side = grid_side(n);
    let bb = domain.bbox();
    let origin = [bb[0], bb[1]];
    let nx = (((bb[2] - bb[0]) / side).ceil() as usize).max(1);
    let ny = (((bb[3] - bb[1]) / side).ceil() as usize).max(1);
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let x0 = origin[0] + i as f64 * side;
            let y0 = origin[1] + j as f64 * side;
            let sq = Polygon::rect(x0, y0, x0 + side, y0 + side);
            let c = sq.intersect(domain);
            if !c.is_empty() && c.area() > 0.0 {
                cells.push((i, j, c));
            }
        }
    }
    GridFamily {
        n,
        side,
        origin,
        dims: (nx, ny),
        cells,
    }
}

impl GridFamily {
    /// Index into `cells` of the grid cell holding `x`, if any.
    pub fn locate(&self, x: Point) -> Option<usize> {
        let i = ((x[0] - self.origin[0]) / self.side).floor();
        let j = ((x[1] - self.origin[1]) / self.side).floor();
        if i < 0.0 || j < 0.0 {
            return None;
        }
        let (i, j) = (i as usize, j as usize);
        self.cells.binary_search_by(|c| (c.1, c.0).cmp(&(j, i))).ok()
    }

    /// Splits every cell of `map` along the grid lines. Returns the refined map, the source
    /// cell of every new cell and its grid cell.
    pub fn subdivide(&self, map: &PAMap) -> (PAMap, Vec<usize>, Vec<usize>) {
        let mut cells = Vec::with_capacity(map.cells.len());
        let mut parents = Vec::with_capacity(map.cells.len());
        let mut owners = Vec::with_capacity(map.cells.len());
        let s = self.side;
        for (k, c) in map.cells.iter().enumerate() {
            let bb = c.poly.bbox();
            let i0 = ((bb[0] - self.origin[0]) / s).floor().max(0.0) as usize;
            let i1 = (((bb[2] - self.origin[0]) / s).ceil() as usize).min(self.dims.0).max(i0 + 1);
            let j0 = ((bb[1] - self.origin[1]) / s).floor().max(0.0) as usize;
            let j1 = (((bb[3] - self.origin[1]) / s).ceil() as usize).min(self.dims.1).max(j0 + 1);
            let floor = 1e-15 * c.poly.area();
            for j in j0..j1 {
                let y0 = self.origin[1] + j as f64 * s;
                let row = if j1 - j0 == 1 {
                    c.poly.clone()
                } else {
                    c.poly.clip([0.0, 1.0], y0 + s).clip([0.0, -1.0], -y0)
                };
                if row.is_empty() {
                    continue;
                }
                for i in i0..i1 {
                    let x0 = self.origin[0] + i as f64 * s;
                    let piece = if i1 - i0 == 1 {
                        row.clone()
                    } else {
                        row.clip([1.0, 0.0], x0 + s).clip([-1.0, 0.0], -x0)
                    };
                    if piece.is_empty() || piece.area() <= floor {
                        continue;
                    }
                    let Ok(owner) = self.cells.binary_search_by(|g| (g.1, g.0).cmp(&(j, i))) else {
                        continue;
                    };
                    cells.push(AffineCell { poly: piece, ..c.clone() });
                    parents.push(k);
                    owners.push(owner);
                }
            }
        }
        (
            PAMap {
                cells,
                domain: map.domain.clone(),
                boundary_affine: map.boundary_affine,
            },
            parents,
            owners,
        )
    }
}
