#![allow(dead_code)]
use stairlam_core::{eps_auto, ModelParams, Params};
use stairlam_staircase::design_t0;

pub fn model3() -> ModelParams {
    ModelParams::new(3.0, 0.125, design_t0(0.125, 3.0), 32, eps_auto(0.125, 3.0)).unwrap()
}

pub fn model15() -> ModelParams {
    ModelParams::new(1.5, 8.0, design_t0(8.0, 1.5), 128, eps_auto(8.0, 1.5)).unwrap()
}

/// Diagnostic model at p = 2, where no admissible c exists.
pub fn model2() -> ModelParams {
    ModelParams::unchecked(2.0, 1.0, design_t0(1.0, 2.0), 16, 0.0)
}

pub fn small_grid(c: f64) -> Vec<Params> {
    Params::lattice(c, &[0.1, 0.5, 0.9])
}

/// Bisection on `g_w(x) = y`, written independently of the library.
pub fn oracle_ginv(y: f64, w: f64, p: f64) -> f64 {
    let g = |x: f64| (x * x + w * w).powf((p - 2.0) / 2.0) * x;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while g(hi) < y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < y {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

/// Brute-force `z_i` to a fixed cutoff straight from the defining products and sums.
pub fn oracle_z(i: usize, p: &Params, pe: f64, cutoff: usize) -> f64 {
    let (a, x0, y0, w) = (p.a, p.x0, p.y0, p.w);
    let x = |k: usize| a * (k * k) as f64 + x0;
    let y = |k: usize| (k as f64).powf(2.0 * (pe - 1.0)) + y0;
    let r = |u: f64| (u * u + w * w).powf((pe - 2.0) / 2.0);
    let mut log_ratio = 0.0;
    let mut sum = 0.0;
    for l in (i + 1)..=cutoff {
        let gi = oracle_ginv(y(l), w, pe);
        let gx = r(x(l - 1)) * x(l - 1);
        let hx = r(x(l - 1)) * w;
        let s = (x(l) + gi) / (x(l - 1) + gi) * (y(l) + gx) / (y(l - 1) + gx);
        log_ratio -= s.ln();
        let h = (x(l) + gi) / (x(l - 1) + gi) * (y(l) - y(l - 1)) / (y(l - 1) + gx) * hx + (x(l) - x(l - 1)) / (x(l - 1) + gi) * r(gi) * w;
        sum += log_ratio.exp() * h;
    }
    sum
}
