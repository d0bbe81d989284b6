//! The sequences `x_i = a i² + x0`, `y_i = i^{2(p-1)} + y0` and the schedule `t_q`.

use stairlam_core::Params;

pub fn y_exponent(p: f64) -> f64 {
    2.0 * (p - 1.0)
}

pub fn sequences(i: usize, params: &Params, p: f64) -> (f64, f64) {
    let fi = i as f64;
    (params.a * fi * fi + params.x0, fi.powf(y_exponent(p)) + params.y0)
}

/// `y_k - y_{k-1}` without cancellation.
pub fn dy(k: usize, p: f64) -> f64 {
    match k {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let e = y_exponent(p);
            let km = (k - 1) as f64;
            km.powf(e) * (e * (1.0 / km).ln_1p()).exp_m1()
        }
    }
}

/// `t_q = 1 - (1 - t0)/2^q`.
pub fn t_q(q: usize, t0: f64) -> f64 {
    1.0 - (1.0 - t0) * 0.5_f64.powi(q as i32)
}
