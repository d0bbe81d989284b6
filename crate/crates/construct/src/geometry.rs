//! Convex polygons in the plane and the few operations the construction needs.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// A convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub verts: Vec<Point>,
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl Polygon {
    /// Builds a polygon, reversing the vertex order if it is clockwise.
    pub fn new(mut verts: Vec<Point>) -> Self {
        let mut p = Polygon { verts: Vec::new() };
        std::mem::swap(&mut p.verts, &mut verts);
        if p.signed_area() < 0.0 {
            p.verts.reverse();
        }
        p
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Polygon {
            verts: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
        }
    }

    pub fn unit_square() -> Self {
        Self::rect(0.0, 0.0, 1.0, 1.0)
    }

    /// Regular `k`-gon inscribed in the circle of radius `r` about `center`.
    pub fn regular(center: Point, r: f64, k: usize) -> Self {
        let verts = (0..k)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / k as f64;
                [center[0] + r * th.cos(), center[1] + r * th.sin()]
            })
            .collect();
        Polygon { verts }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.verts.len();
        let mut s = 0.0;
        for k in 0..n {
            let (a, b) = (self.verts[k], self.verts[(k + 1) % n]);
            s += a[0] * b[1] - a[1] * b[0];
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])).sum()
    }

    pub fn centroid(&self) -> Point {
        let n = self.verts.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for k in 0..n {
            let (a, b) = (self.verts[k], self.verts[(k + 1) % n]);
            let c = a[0] * b[1] - a[1] * b[0];
            cx += (a[0] + b[0]) * c;
            cy += (a[1] + b[1]) * c;
            a2 += c;
        }
        if a2 == 0.0 {
            let m = n.max(1) as f64;
            return [
                self.verts.iter().map(|v| v[0]).sum::<f64>() / m,
                self.verts.iter().map(|v| v[1]).sum::<f64>() / m,
            ];
        }
        [cx / (3.0 * a2), cy / (3.0 * a2)]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.verts.len();
        (0..n).map(move |k| (self.verts[k], self.verts[(k + 1) % n]))
    }

    /// `(xmin, ymin, xmax, ymax)`.
    pub fn bbox(&self) -> [f64; 4] {
        self.verts
            .iter()
            .fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, v| {
                [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])]
            })
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (k, a) in self.verts.iter().enumerate() {
            for b in &self.verts[k + 1..] {
                d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        d
    }

    /// Range of `n·x` over the polygon.
    pub fn extent(&self, n: Point) -> (f64, f64) {
        self.verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let s = dot(n, *v);
            (lo.min(s), hi.max(s))
        })
    }

    /// Keeps the part where `n·x ≤ c` (Sutherland–Hodgman against one half-plane).
    pub fn clip(&self, n: Point, c: f64) -> Polygon {
        let mut out = Vec::with_capacity(self.verts.len() + 1);
        let len = self.verts.len();
        for k in 0..len {
            let a = self.verts[k];
            let b = self.verts[(k + 1) % len];
            let (fa, fb) = (dot(n, a) - c, dot(n, b) - c);
            if fa <= 0.0 {
                out.push(a);
            }
            if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                let t = fa / (fa - fb);
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        dedup_ring(&mut out);
        Polygon { verts: out }
    }

    /// Keeps the part where `g·x + h ≤ 0` for an unnormalized affine function.
    pub fn clip_affine(&self, g: Point, h: f64) -> Polygon {
        self.clip(g, -h)
    }

    /// Intersection with another convex polygon.
    pub fn intersect(&self, other: &Polygon) -> Polygon {
        let mut out = self.clone();
        for (a, b) in other.edges() {
            if out.is_empty() {
                break;
            }
            // outward normal of a counterclockwise edge
            let n = [b[1] - a[1], a[0] - b[0]];
            out = out.clip(n, dot(n, a));
        }
        out
    }

    /// Inward unit normals and offsets `(ν_e, c_e)` with `d_e(x) = ν_e·x − c_e` the distance
    /// to the line of edge `e`, positive inside.
    pub fn inward_lines(&self) -> Vec<(Point, f64)> {
        self.edges()
            .filter_map(|(a, b)| {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let l = dx.hypot(dy);
                if l == 0.0 {
                    return None;
                }
                let nu = [-dy / l, dx / l];
                Some((nu, dot(nu, a)))
            })
            .collect()
    }

    /// Distance from an interior point to the boundary.
    pub fn boundary_distance(&self, x: Point) -> f64 {
        self.inward_lines().iter().map(|(nu, c)| dot(*nu, x) - c).fold(f64::INFINITY, f64::min)
    }

    /// Containment with slack `tol` (in length units).
    pub fn contains(&self, x: Point, tol: f64) -> bool {
        self.inward_lines().iter().all(|(nu, c)| dot(*nu, x) - c >= -tol)
    }

    /// Whether `x` lies on the boundary within `tol`.
    pub fn on_boundary(&self, x: Point, tol: f64) -> bool {
        let d = self.boundary_distance(x);
        d.abs() <= tol
    }

    /// Splits along lines `n·x = const` so that the first piece holds fraction `frac` of the area.
    pub fn split_area(&self, n: Point, frac: f64) -> (Polygon, Polygon) {
        let (lo, hi) = self.extent(n);
        let total = self.area();
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.clip(n, m).area() < frac * total {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * (hi - lo).max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let c = 0.5 * (a + b);
        (self.clip(n, c), self.clip([-n[0], -n[1]], -c))
    }
}

fn dedup_ring(v: &mut Vec<Point>) {
    v.dedup();
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
}
