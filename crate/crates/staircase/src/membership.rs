//! Auditing membership in `U^k_{i,q}` and `U³_i` by inverting the explicit coordinates.
//!
//! `w` and `y0` are read off the entries, `x_{i-1}` is read off or solved linearly, and the
//! remaining slope `a` (with `x0 = x_{i-1} − a (i−1)²`) is found by bisection on `z_{i-1}`,
//! which increases along that line.

use crate::frame::StairFrame;
use crate::ladder::Ladder;
use crate::seq::t_q;
use crate::StairError;
use stairlam_core::{g_inverse, radial_factor, Mat2, ModelParams, Params, SetKind, SetTag, BOX_HI, BOX_LO};

const BISECT_STEPS: usize = 80;
/// Relative tolerance when comparing the reconstructed matrix with the input.
const MATCH_TOL: f64 = 1e-8;

fn in_range(v: f64) -> bool {
    (BOX_LO - 1e-12..=BOX_HI + 1e-12).contains(&v)
}

/// A point `P` of the closed box with `M = Φ^k_{i,t_q}(P)` (or `A_i(P)`), if one exists.
pub fn invert(m: Mat2, tag: SetTag, model: &ModelParams) -> Result<Option<Params>, StairError> {
    let p = model.p;
    let i = tag.i;
    if i < 2 || !m.is_finite() {
        return Ok(None);
    }
    let w = m.m12;
    if !in_range(w) {
        return Ok(None);
    }
    let j = i - 1;
    let e = 2.0 * (p - 1.0);
    let fj = j as f64;
    let t = tag.q.map(|q| t_q(q, model.t0)).unwrap_or(0.0);
    let (x_prev, y0, z_target) = match tag.kind {
        SetKind::U1 => {
            let rf = radial_factor(m.m11, w, p);
            let (g, h) = (rf * m.m11, rf * w);
            let y_prev = (m.m22 + t * g) / (1.0 - t);
            (m.m11, y_prev - fj.powf(e), (m.m21 - t * h) / (1.0 - t))
        }
        SetKind::U2 => {
            let y0 = m.m22 - (i as f64).powf(e);
            if !in_range(y0) {
                return Ok(None);
            }
            let ginv = g_inverse(m.m22, w, p)?;
            let hg = radial_factor(ginv, w, p) * w;
            let x_prev = (m.m11 + t * ginv) / (1.0 - t);
            let v = (m.m21 - t * hg) / (1.0 - t);
            let rf = radial_factor(x_prev, w, p);
            let (g, h) = (rf * x_prev, rf * w);
            let y_prev = fj.powf(e) + y0;
            let d = m.m22 - y_prev;
            (x_prev, y0, (v + d / (y_prev + g) * h) * (y_prev + g) / (m.m22 + g))
        }
        SetKind::U3 => (m.m11, m.m22 - fj.powf(e), m.m21),
    };
    if !in_range(y0) {
        return Ok(None);
    }
    let c = model.c;
    let a_lo = c.max((x_prev - BOX_HI) / (fj * fj));
    let a_hi = (2.0 * c).min((x_prev - BOX_LO) / (fj * fj));
    if !(a_lo <= a_hi) {
        return Ok(None);
    }
    let a_mid = 0.5 * (a_lo + a_hi);
    let mut base = Ladder::new(Params::new(a_mid, x_prev - a_mid * fj * fj, y0, w), p);
    base.extend_to(16 * i)?;
    let z_at = |a: f64| -> Result<f64, StairError> {
        let mut lad = base.rebased(a, x_prev - a * fj * fj);
        Ok(lad.z_series(j, model.tol_series)?.value)
    };
    let f_lo = z_at(a_lo)? - z_target;
    let f_hi = z_at(a_hi)? - z_target;
    let scale = z_target.abs().max(1.0);
    let a_star = if f_lo.abs() <= MATCH_TOL * scale {
        a_lo
    } else if f_hi.abs() <= MATCH_TOL * scale {
        a_hi
    } else if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    } else {
        let (mut lo, mut hi) = (a_lo, a_hi);
        for _ in 0..BISECT_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (z_at(mid)? - z_target).signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let cand = Params::new(a_star, x_prev - a_star * fj * fj, y0, w);
    if !cand.in_closed_box(c) {
        return Ok(None);
    }
    let rebuilt = rebuild(&cand, tag, model)?;
    let ok = rebuilt.max_abs_diff(m) <= MATCH_TOL * m.max_abs().max(1.0);
    Ok(ok.then_some(cand))
}

fn rebuild(params: &Params, tag: SetTag, model: &ModelParams) -> Result<Mat2, StairError> {
    let mut lad = Ladder::new(*params, model.p);
    let z = lad.z_profile(tag.i, model.tol_series)?;
    let f = StairFrame::new(*params, model.p, *lad.step(tag.i), z[tag.i - 1], z[tag.i]);
    match tag.kind {
        SetKind::U1 => f.phi(1, t_q(tag.q.unwrap_or(0), model.t0)),
        SetKind::U2 => f.phi(2, t_q(tag.q.unwrap_or(0), model.t0)),
        SetKind::U3 => Ok(f.a()),
    }
}

/// Whether `M` lies in the set named by `tag`.
pub fn membership(m: Mat2, tag: SetTag, model: &ModelParams) -> bool {
    matches!(invert(m, tag, model), Ok(Some(_)))
}
