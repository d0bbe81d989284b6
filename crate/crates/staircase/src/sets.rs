//! Target-set bookkeeping: the sets entering `V_n`, the sign conditions that keep the
//! three families apart, and the choice of `t0`.

use crate::frame::StairFrame;
use crate::ladder::Step;
use crate::StairError;
use serde::Serialize;
use stairlam_core::{Mat2, ModelParams, Params, SetKind, SetTag};

/// Required distance between images of different indices within one family.
pub const DIST_MIN: f64 = 1.0;

/// Safety margin added to the analytic lower bound for `t0` when room allows.
const T0_MARGIN: f64 = 0.02;

/// `t* + min{0.02, (1 − t*)/2}` with `t* = max{1/(1+c^{p−1}), 2c/(1+2c)}`; stays below 1.
pub fn design_t0(c: f64, p: f64) -> f64 {
    let ts = (1.0 / (1.0 + c.powf(p - 1.0))).max(2.0 * c / (1.0 + 2.0 * c));
    ts + T0_MARGIN.min(0.5 * (1.0 - ts))
}

/// Signed margin of the sign condition for `kind`; the condition holds with constant `k`
/// iff the margin is at least `k`. `U¹`: `x ≥ k, y ≤ −k`; `U²`: `x ≤ −k, y ≥ k`; `U³`: `x, y ≥ k`,
/// with `x = m11`, `y = m22`.
pub fn sign_margin(m: Mat2, kind: SetKind) -> f64 {
    match kind {
        SetKind::U1 => m.m11.min(-m.m22),
        SetKind::U2 => (-m.m11).min(m.m22),
        SetKind::U3 => m.m11.min(m.m22),
    }
}

/// Worst sign margins over a grid and index range, and the worst lower bound on the
/// distance between images of different indices at the same slope `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignMargins {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// Lower bound on the same-family, different-index distance, from the `(m11, m22)` entries.
    pub index_gap: f64,
}

impl SignMargins {
    pub fn min_sign(&self) -> f64 {
        self.u1.min(self.u2).min(self.u3)
    }
}

/// `z`-free frame: the sign entries of `Φ¹, Φ², A` do not involve `z`.
fn bare_frame(i: usize, p: &Params, model: &ModelParams) -> Result<StairFrame, StairError> {
    Ok(StairFrame::new(*p, model.p, Step::at(i, p, model.p)?, 0.0, 0.0))
}

/// Evaluates the sign conditions at `t = t0` (the worst case over `[t0, 1]`, since the
/// relevant entries are affine and monotone in `t`) and the separation between images of
/// consecutive indices over all grid pairs sharing the same slope `a`.
pub fn t0_margins(model: &ModelParams, i_lo: usize, i_hi: usize, grid: &[Params]) -> Result<SignMargins, StairError> {
    let mut out = SignMargins {
        u1: f64::INFINITY,
        u2: f64::INFINITY,
        u3: f64::INFINITY,
        index_gap: f64::INFINITY,
    };
    let t = model.t0;
    let mut slopes: Vec<f64> = grid.iter().map(|p| p.a).collect();
    slopes.sort_by(f64::total_cmp);
    slopes.dedup();
    for a in slopes {
        let group: Vec<&Params> = grid.iter().filter(|p| p.a == a).collect();
        let mut prev: Vec<[[f64; 2]; 3]> = Vec::new();
        for i in i_lo..=i_hi {
            let mut cur = Vec::with_capacity(group.len());
            for p in &group {
                let f = bare_frame(i, p, model)?;
                let m1 = f.phi(1, t)?;
                let m2 = f.phi(2, t)?;
                let am = f.a();
                out.u1 = out.u1.min(sign_margin(m1, SetKind::U1));
                out.u2 = out.u2.min(sign_margin(m2, SetKind::U2));
                out.u3 = out.u3.min(sign_margin(am, SetKind::U3));
                cur.push([[m1.m11, m1.m22], [m2.m11, m2.m22], [am.m11, am.m22]]);
            }
            for u in &cur {
                for v in &prev {
                    for k in 0..3 {
                        out.index_gap = out.index_gap.min((u[k][0] - v[k][0]).hypot(u[k][1] - v[k][1]));
                    }
                }
            }
            prev = cur;
        }
    }
    Ok(out)
}

/// Tags of the sets whose union is `V_n`, in a fixed order.
pub fn v_n_tags(i_start: usize, n: usize) -> Vec<SetTag> {
    let q = i_start + n - 1;
    let mut v: Vec<SetTag> = (i_start..i_start + n).map(|i| SetTag::u1(i, q)).collect();
    v.extend((i_start..i_start + n).map(|i| SetTag::u2(i, q)));
    v.push(SetTag::u3(i_start + n));
    v
}
