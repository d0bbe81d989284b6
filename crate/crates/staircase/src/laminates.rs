//! Laminates supported on the target sets: the three-atom base laminate, its iterates
//! along the staircase, and the two boundary laminates that move `t_q` to `t_{q+1}`.

use crate::frame::StairFrame;
use crate::ladder::Ladder;
use crate::seq::t_q;
use crate::StairError;
use stairlam_core::{Mat2, ModelParams, Params, SetTag};
use stairlam_laminate::Laminate;

/// The staircase at one `P`, with `z_0..=z_top` resolved.
#[derive(Debug, Clone)]
pub struct Stair {
    pub params: Params,
    pub model: ModelParams,
    ladder: Ladder,
    z: Vec<f64>,
}

fn pre(ok: bool, msg: impl FnOnce() -> String) -> Result<(), StairError> {
    if ok {
        Ok(())
    } else {
        Err(StairError::Precondition(msg()))
    }
}

impl Stair {
    pub fn new(params: Params, model: ModelParams, top: usize) -> Result<Self, StairError> {
        let mut ladder = Ladder::new(params, model.p);
        let top = top.max(1);
        let z = ladder.z_profile(top, model.tol_series)?;
        Ok(Stair { params, model, ladder, z })
    }

    pub fn top(&self) -> usize {
        self.z.len() - 1
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn z(&self, k: usize) -> f64 {
        self.z[k]
    }

    pub fn t(&self, q: usize) -> f64 {
        t_q(q, self.model.t0)
    }

    pub fn frame(&self, i: usize) -> Result<StairFrame, StairError> {
        pre(i >= 1 && i <= self.top(), || format!("frame index {i} outside 1..={}", self.top()))?;
        Ok(StairFrame::new(self.params, self.model.p, *self.ladder.step(i), self.z[i - 1], self.z[i]))
    }

    /// `A_i`, available for `1 ≤ i ≤ top + 1`.
    pub fn a_matrix(&self, i: usize) -> Result<Mat2, StairError> {
        if i >= 1 && i <= self.top() {
            Ok(self.frame(i)?.a())
        } else {
            Ok(self.frame(i.saturating_sub(1))?.c())
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn split(&self, lam: &mut Laminate, idx: usize, b: Mat2, tb: Option<SetTag>, c: Mat2, tc: Option<SetTag>, s: f64) -> Result<(usize, usize), StairError> {
        Ok(lam.split_in_place_with(idx, b, tb, c, tc, s, 1.0, self.model.tol_rank)?)
    }

    /// Splits the atom `A_i` at `idx` into `Φ¹_{i,t_q}`, `Φ²_{i,t_q}`, `A_{i+1}`; returns the index of `A_{i+1}`.
    pub fn split_base_at(&self, lam: &mut Laminate, idx: usize, i: usize, q: usize) -> Result<usize, StairError> {
        let f = self.frame(i)?;
        let t = self.t(q);
        let (s1, s2) = f.split_fractions(t);
        let (_, ie) = self.split(lam, idx, f.phi(1, t)?, Some(SetTag::u1(i, q)), f.e(), None, s1)?;
        let (_, ic) = self.split(lam, ie, f.phi(2, t)?, Some(SetTag::u2(i, q)), f.c(), Some(SetTag::u3(i + 1)), s2)?;
        Ok(ic)
    }

    /// Iterates the base splitting from `A_{j1}` at `idx` up to `A_{j2}`; returns the index of `A_{j2}`.
    pub fn split_staircase_at(&self, lam: &mut Laminate, idx: usize, j1: usize, j2: usize, q: usize) -> Result<usize, StairError> {
        let mut cur = idx;
        for r in j1..j2 {
            cur = self.split_base_at(lam, cur, r, q)?;
        }
        Ok(cur)
    }

    /// `ν_{i,q}(P)` with barycenter `A_i(P)`.
    pub fn base_laminate(&self, i: usize, q: usize) -> Result<Laminate, StairError> {
        let mut lam = Laminate::dirac_tagged(self.a_matrix(i)?, Some(SetTag::u3(i)));
        self.split_base_at(&mut lam, 0, i, q)?;
        Ok(lam)
    }

    /// `ν_{j1,j2,q}(P)` with barycenter `A_{j1}(P)` and `2(j2 − j1) + 1` atoms.
    pub fn staircase_laminate(&self, j1: usize, j2: usize, q: usize) -> Result<Laminate, StairError> {
        pre(j2 > j1 && j1 >= 1, || format!("staircase needs j2 > j1 >= 1, got {j1}, {j2}"))?;
        pre(q + 2 >= j2, || format!("staircase needs q >= j2 - 2, got q = {q}, j2 = {j2}"))?;
        let mut lam = Laminate::dirac_tagged(self.a_matrix(j1)?, Some(SetTag::u3(j1)));
        self.split_staircase_at(&mut lam, 0, j1, j2, q)?;
        Ok(lam)
    }

    /// `ν^k_{j1,j2,q}(P)` with barycenter `Φ^k_{j1,t_q}(P)`.
    pub fn boundary_laminate(&self, k: u8, j1: usize, j2: usize, q: usize) -> Result<Laminate, StairError> {
        pre(q + 2 >= j2, || format!("boundary laminate needs q >= j2 - 2, got q = {q}, j2 = {j2}"))?;
        let f = self.frame(j1)?;
        let (tq, tq1) = (self.t(q), self.t(q + 1));
        match k {
            1 => {
                pre(j2 > j1, || format!("first boundary laminate needs j2 > j1, got {j1}, {j2}"))?;
                let mut lam = Laminate::dirac_tagged(f.phi(1, tq)?, Some(SetTag::u1(j1, q)));
                let mu = self.boundary_main_weight(1, j1, q)?;
                let (_, ia) = self.split(&mut lam, 0, f.phi(1, tq1)?, Some(SetTag::u1(j1, q + 1)), f.a(), Some(SetTag::u3(j1)), mu)?;
                self.split_staircase_at(&mut lam, ia, j1, j2, q + 1)?;
                Ok(lam)
            }
            2 => {
                pre(j2 > j1 + 1, || format!("second boundary laminate needs j2 > j1 + 1, got {j1}, {j2}"))?;
                let mut lam = Laminate::dirac_tagged(f.phi(2, tq)?, Some(SetTag::u2(j1, q)));
                let mu = self.boundary_main_weight(2, j1, q)?;
                let (_, ic) = self.split(&mut lam, 0, f.phi(2, tq1)?, Some(SetTag::u2(j1, q + 1)), f.c(), Some(SetTag::u3(j1 + 1)), mu)?;
                self.split_staircase_at(&mut lam, ic, j1 + 1, j2, q + 1)?;
                Ok(lam)
            }
            _ => Err(StairError::Precondition(format!("boundary laminate kind {k} is not 1 or 2"))),
        }
    }

    /// Mixing weight of the main atom of `ν^k_{j1,·,q}`: `t_q/t_{q+1}` for `k = 1`,
    /// `(λ_D + t_q λ_C)/(λ_D + t_{q+1} λ_C)` for `k = 2`.
    pub fn boundary_main_weight(&self, k: u8, j1: usize, q: usize) -> Result<f64, StairError> {
        let (tq, tq1) = (self.t(q), self.t(q + 1));
        match k {
            1 => Ok(tq / tq1),
            2 => {
                let l = self.frame(j1)?.lambdas();
                Ok((l.ld + tq * l.lc) / (l.ld + tq1 * l.lc))
            }
            _ => Err(StairError::Precondition(format!("boundary laminate kind {k} is not 1 or 2"))),
        }
    }
}
