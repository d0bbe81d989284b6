//! Dense 2×2 real matrices.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Guard against dividing by a vanishing norm in [`rank_one_gap`].
const NORM_FLOOR: f64 = 1e-300;

/// A real 2×2 matrix `[[m11, m12], [m21, m22]]`, serialized row-major as `[f64; 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl From<[f64; 4]> for Mat2 {
    fn from(v: [f64; 4]) -> Self {
        Mat2::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Mat2> for [f64; 4] {
    fn from(m: Mat2) -> Self {
        m.to_array()
    }
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        m11: 0.0,
        m12: 0.0,
        m21: 0.0,
        m22: 0.0,
    };
    pub const IDENTITY: Mat2 = Mat2 {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn from_rows(r1: [f64; 2], r2: [f64; 2]) -> Self {
        Mat2::new(r1[0], r1[1], r2[0], r2[1])
    }

    /// The dyad `a ⊗ n`, i.e. `a nᵀ`.
    pub fn outer(a: [f64; 2], n: [f64; 2]) -> Self {
        Mat2::new(a[0] * n[0], a[0] * n[1], a[1] * n[0], a[1] * n[1])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn row1(self) -> [f64; 2] {
        [self.m11, self.m12]
    }

    pub fn row2(self) -> [f64; 2] {
        [self.m21, self.m22]
    }

    pub fn det(self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn norm_sq(self) -> f64 {
        self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22
    }

    /// Frobenius norm.
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Matrix-vector product `M x`.
    pub fn apply(self, x: [f64; 2]) -> [f64; 2] {
        [self.m11 * x[0] + self.m12 * x[1], self.m21 * x[0] + self.m22 * x[1]]
    }

    /// Frobenius inner product.
    pub fn dot(self, o: Mat2) -> f64 {
        self.m11 * o.m11 + self.m12 * o.m12 + self.m21 * o.m21 + self.m22 * o.m22
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(self, o: Mat2) -> f64 {
        (self - o).max_abs()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m * self
    }
}

pub fn det(m: Mat2) -> f64 {
    m.det()
}

/// Normalized determinant `|det M| / ‖M‖²`. Vanishes exactly on matrices of rank ≤ 1,
/// and is scale invariant.
pub fn rank_one_gap(m: Mat2) -> f64 {
    m.det().abs() / m.norm_sq().max(NORM_FLOOR)
}
