//! Piecewise affine maps on polygonal cells and their audits.

use crate::geometry::{Point, Polygon};
use crate::ConstructError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use stairlam_core::{Mat2, SetTag};
use std::io::{BufRead, Write};

/// What a cell's gradient is meant to approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellTag {
    Set(SetTag),
    /// An intermediate atom that carries no target set.
    Untagged,
    /// Taper cell restoring boundary values; excluded from inclusion audits.
    BoundaryLayer,
}

impl CellTag {
    pub fn set(&self) -> Option<SetTag> {
        match self {
            CellTag::Set(t) => Some(*t),
            _ => None,
        }
    }

    pub fn is_layer(&self) -> bool {
        matches!(self, CellTag::BoundaryLayer)
    }
}

impl From<Option<SetTag>> for CellTag {
    fn from(t: Option<SetTag>) -> Self {
        t.map_or(CellTag::Untagged, CellTag::Set)
    }
}

impl Serialize for CellTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CellTag::Set(t) => t.serialize(s),
            CellTag::Untagged => s.serialize_none(),
            CellTag::BoundaryLayer => s.serialize_str("boundary-layer"),
        }
    }
}

impl<'de> Deserialize<'de> for CellTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Set(SetTag),
            Word(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(CellTag::Untagged),
            Some(Repr::Set(t)) => Ok(CellTag::Set(t)),
            Some(Repr::Word(w)) if w == "boundary-layer" => Ok(CellTag::BoundaryLayer),
            Some(Repr::Word(w)) => Err(serde::de::Error::custom(format!("unknown cell tag {w:?}"))),
        }
    }
}

/// One affine piece `x ↦ A x + b` on a convex polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineCell {
    pub poly: Polygon,
    #[serde(rename = "A")]
    pub a: Mat2,
    pub b: Point,
    pub tag: CellTag,
    /// The atom this cell realizes; absent for boundary-layer cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Mat2>,
}

impl AffineCell {
    pub fn eval(&self, x: Point) -> Point {
        let y = self.a.apply(x);
        [y[0] + self.b[0], y[1] + self.b[1]]
    }
}

/// A continuous piecewise affine map on a convex domain, affine on its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PAMap {
    pub cells: Vec<AffineCell>,
    pub domain: Polygon,
    /// `(M, b0)` with `w = M x + b0` on the boundary.
    pub boundary_affine: (Mat2, Point),
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Uniform bucket grid over cell bounding boxes for point location.
pub struct CellIndex {
    origin: Point,
    size: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<u32>>,
}

impl CellIndex {
    pub fn new(cells: &[AffineCell], domain: &Polygon) -> Self {
        let bb = domain.bbox();
        let span = (bb[2] - bb[0]).max(bb[3] - bb[1]).max(f64::MIN_POSITIVE);
        let side = ((cells.len() as f64).sqrt().ceil() as usize).clamp(1, 2048);
        let size = span / side as f64;
        let dims = (side, side);
        let mut buckets = vec![Vec::new(); side * side];
        let origin = [bb[0], bb[1]];
        let clampi = |v: f64| ((v / size).floor().max(0.0) as usize).min(side - 1);
        for (k, c) in cells.iter().enumerate() {
            let b = c.poly.bbox();
            let (i0, i1) = (clampi(b[0] - origin[0]), clampi(b[2] - origin[0]));
            let (j0, j1) = (clampi(b[1] - origin[1]), clampi(b[3] - origin[1]));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * side + i].push(k as u32);
                }
            }
        }
        CellIndex { origin, size, dims, buckets }
    }

    pub fn candidates(&self, x: Point) -> &[u32] {
        let i = (((x[0] - self.origin[0]) / self.size).floor().max(0.0) as usize).min(self.dims.0 - 1);
        let j = (((x[1] - self.origin[1]) / self.size).floor().max(0.0) as usize).min(self.dims.1 - 1);
        &self.buckets[j * self.dims.0 + i]
    }
}

impl PAMap {
    /// The affine map `M x + b0` on one cell.
    pub fn affine(domain: Polygon, m: Mat2, b0: Point, tag: CellTag) -> Self {
        let target = if tag.is_layer() { None } else { Some(m) };
        PAMap {
            cells: vec![AffineCell {
                poly: domain.clone(),
                a: m,
                b: b0,
                tag,
                target,
            }],
            domain,
            boundary_affine: (m, b0),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn boundary_eval(&self, x: Point) -> Point {
        let (m, b0) = self.boundary_affine;
        let y = m.apply(x);
        [y[0] + b0[0], y[1] + b0[1]]
    }

    /// Natural size of the values, used to make the audit tolerances relative.
    pub fn value_scale(&self) -> f64 {
        let diam = self.domain.diameter();
        self.cells
            .iter()
            .fold(1.0_f64, |s, c| s.max(c.a.max_abs() * diam + c.b[0].abs().max(c.b[1].abs())))
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.poly.area()).sum()
    }

    /// `|Σ|cell| − |domain|| / |domain|`.
    pub fn area_defect(&self) -> f64 {
        let d = self.domain.area();
        (self.total_area() - d).abs() / d
    }

    pub fn boundary_layer_area(&self) -> f64 {
        self.cells.iter().filter(|c| c.tag.is_layer()).map(|c| c.poly.area()).sum()
    }

    /// Largest `|w(v) − (M v + b0)|` over cell vertices on the domain boundary.
    pub fn boundary_deviation(&self) -> f64 {
        let tol = 1e-12 * self.domain.diameter().max(1.0);
        let mut worst: f64 = 0.0;
        for c in &self.cells {
            for &v in &c.poly.verts {
                if self.domain.on_boundary(v, tol) {
                    worst = worst.max(dist(c.eval(v), self.boundary_eval(v)));
                }
            }
        }
        worst
    }

    /// Largest jump between the affine traces of cells sharing a point, over every cell vertex.
    /// The difference of two affine traces along a shared segment is affine, so checking the
    /// vertices of both cells covers the whole segment.
    pub fn continuity_gap(&self) -> f64 {
        let idx = CellIndex::new(&self.cells, &self.domain);
        let tol = 1e-12 * self.domain.diameter().max(1.0);
        let mut worst: f64 = 0.0;
        for (k, c) in self.cells.iter().enumerate() {
            for &v in &c.poly.verts {
                let here = c.eval(v);
                for &o in idx.candidates(v) {
                    let o = o as usize;
                    if o != k && self.cells[o].poly.contains(v, tol) {
                        worst = worst.max(dist(here, self.cells[o].eval(v)));
                    }
                }
            }
        }
        worst
    }

    /// `(min, max)` of the `m12` entry over all cells.
    pub fn m12_range(&self) -> (f64, f64) {
        self.cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.a.m12), hi.max(c.a.m12)))
    }

    /// Largest `|A − target|` (max-entry) over non-boundary-layer cells.
    pub fn gradient_drift(&self) -> f64 {
        self.cells
            .iter()
            .filter_map(|c| c.target.filter(|_| !c.tag.is_layer()).map(|t| c.a.max_abs_diff(t)))
            .fold(0.0, f64::max)
    }

    /// Largest gradient norm, the Lipschitz constant of the map.
    pub fn lipschitz(&self) -> f64 {
        self.cells.iter().map(|c| c.a.norm()).fold(0.0, f64::max)
    }

    /// Largest `|self − old|` when each cell of `self` lies inside the cell `parents[k]` of
    /// `old`; the difference is affine per cell, so vertices suffice.
    pub fn sup_distance(&self, old: &PAMap, parents: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, &p) in self.cells.iter().zip(parents) {
            for &v in &c.poly.verts {
                worst = worst.max(dist(c.eval(v), old.cells[p].eval(v)));
            }
        }
        worst
    }

    /// Area of cells whose tag satisfies `pred`.
    pub fn area_where<F: Fn(&CellTag) -> bool>(&self, pred: F) -> f64 {
        self.cells.iter().filter(|c| pred(&c.tag)).map(|c| c.poly.area()).sum()
    }

    /// One JSON object per cell.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), ConstructError> {
        for c in &self.cells {
            serde_json::to_writer(&mut out, c).map_err(|e| ConstructError::Io(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| ConstructError::Io(e.to_string()))?;
        }
        Ok(())
    }

    /// Reads cells written by [`PAMap::write_jsonl`] onto a known domain and boundary datum.
    pub fn read_jsonl<R: BufRead>(input: R, domain: Polygon, boundary_affine: (Mat2, Point)) -> Result<PAMap, ConstructError> {
        let mut cells = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| ConstructError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            cells.push(serde_json::from_str(&line).map_err(|e| ConstructError::Io(e.to_string()))?);
        }
        Ok(PAMap {
            cells,
            domain,
            boundary_affine,
        })
    }
}
