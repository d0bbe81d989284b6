//! The constraint set `K_p` and the scalar maps `h_w`, `g_w`, `g_w⁻¹`.
//!
//! `K_p` is the graph of `(x, y) ↦ |(x, y)|^{p-2} (y, -x)` over the first row.

use crate::{CoreError, Mat2};

const NEWTON_CAP: usize = 200;
const BRACKET_CAP: usize = 2100;

/// `|(x, w)|^{p-2}`, finite away from the origin. Equals 1 when `p = 2`.
pub fn radial_factor(x: f64, w: f64, p: f64) -> f64 {
    if p == 2.0 {
        return 1.0;
    }
    (x * x + w * w).powf(0.5 * (p - 2.0))
}

fn check_origin(x: f64, w: f64, p: f64) -> Result<(), CoreError> {
    if p < 2.0 && x == 0.0 && w == 0.0 {
        Err(CoreError::SingularOrigin { p })
    } else {
        Ok(())
    }
}

/// `(h_w(x), g_w(x)) = |(x, w)|^{p-2} (w, x)`.
pub fn h_g_eval(x: f64, w: f64, p: f64) -> Result<(f64, f64), CoreError> {
    check_origin(x, w, p)?;
    if x == 0.0 && w == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = radial_factor(x, w, p);
    Ok((f * w, f * x))
}

/// `∂_x g_w(x) = |(x, w)|^{p-4} ((p-1) x² + w²)`.
pub fn g_prime(x: f64, w: f64, p: f64) -> f64 {
    let r2 = x * x + w * w;
    r2.powf(0.5 * (p - 4.0)) * ((p - 1.0) * x * x + w * w)
}

/// `∂_x h_w(x) = (p-2) |(x, w)|^{p-4} x w`.
pub fn h_prime(x: f64, w: f64, p: f64) -> f64 {
    let r2 = x * x + w * w;
    (p - 2.0) * r2.powf(0.5 * (p - 4.0)) * x * w
}

fn g_unchecked(x: f64, w: f64, p: f64) -> f64 {
    radial_factor(x, w, p) * x
}

/// The unique `x` with `g_w(x) = y`.
///
/// `g_w` is odd and strictly increasing, so the positive branch is bracketed and
/// solved by Newton steps that fall back to bisection whenever they leave the bracket.
pub fn g_inverse(y: f64, w: f64, p: f64) -> Result<f64, CoreError> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let fail = CoreError::NoConvergence { y, w, p };
    if !y.is_finite() || !w.is_finite() {
        return Err(fail);
    }
    let target = y.abs();
    let sign = y.signum();
    let wa = w.abs();
    let pure = target.powf(1.0 / (p - 1.0));
    if wa == 0.0 || p == 2.0 {
        let x = if p == 2.0 { target } else { pure };
        return Ok(sign * x);
    }

    // g(x) ≥ x^{p-1} and g(x) ≥ |w|^{p-2} x when p > 2; reversed when p < 2.
    let linear = target / wa.powf(p - 2.0);
    let (mut lo, mut hi) = if p > 2.0 {
        (0.0, pure.min(linear))
    } else {
        let mut hi = pure.max(linear).max(f64::MIN_POSITIVE);
        let mut k = 0;
        while g_unchecked(hi, wa, p) < target {
            hi *= 2.0;
            k += 1;
            if k > BRACKET_CAP || !hi.is_finite() {
                return Err(fail);
            }
        }
        (0.0, hi)
    };

    // Start from the expansion of g around the w = 0 solution when it is accurate.
    let mut x = if pure > 4.0 * wa {
        pure * (1.0 - (p - 2.0) * wa * wa / (2.0 * (p - 1.0) * pure * pure))
    } else {
        0.5 * (lo + hi)
    };
    if !(x >= lo && x <= hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..NEWTON_CAP {
        let f = g_unchecked(x, wa, p) - target;
        if f == 0.0 {
            return Ok(sign * x);
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = g_prime(x, wa, p);
        let step = f / d;
        // rounding in f limits the attainable resolution to about ε·y/g'
        if step.abs() <= 4.0 * f64::EPSILON * (x + target / d) {
            return Ok(sign * (x - step));
        }
        let mut next = x - step;
        if !(next >= lo && next <= hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(sign * next);
        }
        x = next;
    }
    Err(fail)
}

/// The point of `K_p` over the first row `(x, y)`.
pub fn kp_point(x: f64, y: f64, p: f64) -> Result<Mat2, CoreError> {
    check_origin(x, y, p)?;
    let [s1, s2] = kp_second_row(x, y, p);
    Ok(Mat2::new(x, y, s1, s2))
}

/// Second row of the `K_p` point over `(x, y)`, continuously extended by 0 at the origin.
pub fn kp_second_row(x: f64, y: f64, p: f64) -> [f64; 2] {
    if x == 0.0 && y == 0.0 {
        return [0.0, 0.0];
    }
    let f = radial_factor(x, y, p);
    [f * y, -f * x]
}

/// Distance of the second row of `m` from the graph value over its first row.
pub fn dist_to_kp(m: Mat2, p: f64) -> f64 {
    let [s1, s2] = kp_second_row(m.m11, m.m12, p);
    (m.m21 - s1).hypot(m.m22 - s2)
}
