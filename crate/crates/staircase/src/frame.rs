//! The endpoint matrices at one index.

use crate::ladder::Step;
use crate::StairError;
use serde::Serialize;
use stairlam_core::{Mat2, Params};

/// Barycentric weights of the two splittings at index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambdas {
    pub lb: f64,
    pub le: f64,
    pub lc: f64,
    pub ld: f64,
}

/// All scalars that determine `A_i, B_i, E_i, C_i, D_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairFrame {
    pub i: usize,
    pub params: Params,
    pub p: f64,
    pub step: Step,
    pub z_prev: f64,
    pub z: f64,
    pub v: f64,
}

impl StairFrame {
    pub fn new(params: Params, p: f64, step: Step, z_prev: f64, z: f64) -> Self {
        let s = &step;
        let v = (s.y + s.gx) / (s.y_prev + s.gx) * z_prev - s.dy / (s.y_prev + s.gx) * s.hx;
        StairFrame {
            i: s.k,
            params,
            p,
            step,
            z_prev,
            z,
            v,
        }
    }

    fn w(&self) -> f64 {
        self.params.w
    }

    pub fn a(&self) -> Mat2 {
        let s = &self.step;
        Mat2::new(s.x_prev, self.w(), self.z_prev, s.y_prev)
    }

    pub fn b(&self) -> Mat2 {
        let s = &self.step;
        Mat2::new(s.x_prev, self.w(), s.hx, -s.gx)
    }

    pub fn e(&self) -> Mat2 {
        let s = &self.step;
        Mat2::new(s.x_prev, self.w(), self.v, s.y)
    }

    /// Equals `A_{i+1}`.
    pub fn c(&self) -> Mat2 {
        let s = &self.step;
        Mat2::new(s.x, self.w(), self.z, s.y)
    }

    pub fn d(&self) -> Mat2 {
        let s = &self.step;
        Mat2::new(-s.ginv, self.w(), s.hg, s.y)
    }

    pub fn lambdas(&self) -> Lambdas {
        let s = &self.step;
        let den_y = s.y + s.gx;
        let den_x = s.x + s.ginv;
        Lambdas {
            lb: s.dy / den_y,
            le: (s.y_prev + s.gx) / den_y,
            lc: (s.x_prev + s.ginv) / den_x,
            ld: self.params.a * (2 * s.k - 1) as f64 / den_x,
        }
    }

    /// `Φ¹_{i,t} = A + t λ_E (B − E)` and `Φ²_{i,t} = E + t λ_C (D − C)`.
    pub fn phi(&self, k: u8, t: f64) -> Result<Mat2, StairError> {
        let l = self.lambdas();
        match k {
            1 => Ok(self.a() + (self.b() - self.e()) * (t * l.le)),
            2 => Ok(self.e() + (self.d() - self.c()) * (t * l.lc)),
            _ => Err(StairError::Precondition(format!("interpolation map index {k} is not 1 or 2"))),
        }
    }

    /// Weights `(λ¹, λ², λ³)` of the three-atom laminate at level `t`.
    pub fn base_weights(&self, t: f64) -> (f64, f64, f64) {
        let (w1, s2) = self.split_fractions(t);
        (w1, (1.0 - w1) * s2, (1.0 - w1) * (1.0 - s2))
    }

    /// `(λ_B/(λ_B + tλ_E), λ_D/(λ_D + tλ_C))`.
    pub fn split_fractions(&self, t: f64) -> (f64, f64) {
        let l = self.lambdas();
        (l.lb / (l.lb + t * l.le), l.ld / (l.ld + t * l.lc))
    }
}
