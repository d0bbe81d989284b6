use crate::AnalysisError;
use serde::Serialize;
use stairlam_construct::{Point, Polygon};

/// The bump `(1 − |x−c|²/r²)³`, clipped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction {
    pub center: Point,
    pub radius: f64,
}

impl TestFunction {
    /// Checks that the support lies in `domain`.
    pub fn new(center: Point, radius: f64, domain: &Polygon) -> Result<Self, AnalysisError> {
        if !(radius > 0.0) || !domain.contains(center, 0.0) || domain.boundary_distance(center) < radius {
            return Err(AnalysisError::Support { center, radius });
        }
        Ok(TestFunction { center, radius })
    }

    fn s(&self, x: Point) -> f64 {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        (dx * dx + dy * dy) / (self.radius * self.radius)
    }

    pub fn value(&self, x: Point) -> f64 {
        let s = self.s(x);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - s).powi(3)
        }
    }

    pub fn gradient(&self, x: Point) -> Point {
        let s = self.s(x);
        if s >= 1.0 {
            return [0.0, 0.0];
        }
        let f = -6.0 * (1.0 - s).powi(2) / (self.radius * self.radius);
        [f * (x[0] - self.center[0]), f * (x[1] - self.center[1])]
    }

    /// `‖∇φ‖_{L¹} = 32πr/35`.
    pub fn grad_l1(&self) -> f64 {
        32.0 * std::f64::consts::PI * self.radius / 35.0
    }

    /// Parameters `t ∈ (0, 1)` where the segment `p → q` crosses the support circle.
    pub fn crossings(&self, p: Point, q: Point) -> Vec<f64> {
        let d = [q[0] - p[0], q[1] - p[1]];
        let m = [p[0] - self.center[0], p[1] - self.center[1]];
        let a = d[0] * d[0] + d[1] * d[1];
        let b = 2.0 * (m[0] * d[0] + m[1] * d[1]);
        let c = m[0] * m[0] + m[1] * m[1] - self.radius * self.radius;
        let disc = b * b - 4.0 * a * c;
        if a == 0.0 || disc <= 0.0 {
            return Vec::new();
        }
        let r = disc.sqrt();
        let mut t: Vec<f64> = [(-b - r) / (2.0 * a), (-b + r) / (2.0 * a)]
            .into_iter()
            .filter(|t| *t > 0.0 && *t < 1.0)
            .collect();
        t.sort_by(f64::total_cmp);
        t
    }

    /// Whether the support meets the box `[x0, y0, x1, y1]`.
    pub fn meets(&self, bb: [f64; 4]) -> bool {
        let cx = self.center[0].clamp(bb[0], bb[2]);
        let cy = self.center[1].clamp(bb[1], bb[3]);
        (cx - self.center[0]).hypot(cy - self.center[1]) < self.radius
    }
}

/// Nine bumps centred on the `3 × 3` lattice at quarters of the bounding box, with the largest
/// common radius keeping every support inside `domain` (with a 10% margin).
pub fn bump_battery(domain: &Polygon) -> Result<Vec<TestFunction>, AnalysisError> {
    let bb = domain.bbox();
    let centers: Vec<Point> = [0.25, 0.5, 0.75]
        .iter()
        .flat_map(|&fy| [0.25, 0.5, 0.75].map(|fx| [bb[0] + fx * (bb[2] - bb[0]), bb[1] + fy * (bb[3] - bb[1])]))
        .collect();
    let r = 0.9
        * centers
            .iter()
            .map(|c| if domain.contains(*c, 0.0) { domain.boundary_distance(*c) } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
    centers.into_iter().map(|c| TestFunction::new(c, r, domain)).collect()
}
