//! `⟨div(|Du|^{p−2}Du), φ⟩` for piecewise affine `w`. Per cell the flux `F` is constant, so the
//! pairing is `−Σ F · ∫_cell ∇φ`, and `∫_cell ∇φ = ∮ φ ν` by the divergence theorem.

use crate::bump::TestFunction;
use rayon::prelude::*;
use stairlam_construct::{PAMap, Point};

/// Gauss–Legendre points per edge piece. Edges are cut where they cross the support circle,
/// so each piece sees a polynomial of degree 6 and the rule is exact.
pub const QUAD_ORDER: usize = 8;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

fn flux(g: Point, p: f64) -> Point {
    let n = g[0].hypot(g[1]);
    if n == 0.0 {
        return [0.0, 0.0];
    }
    let f = n.powf(p - 2.0);
    [f * g[0], f * g[1]]
}

fn cell_grad_integral(poly: &[Point], phi: &TestFunction, rule: &[(f64, f64)]) -> Point {
    let mut acc = [0.0, 0.0];
    let k = poly.len();
    for e in 0..k {
        let (p, q) = (poly[e], poly[(e + 1) % k]);
        let mut cuts = vec![0.0];
        cuts.extend(phi.crossings(p, q));
        cuts.push(1.0);
        let mut line = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            for &(t, wt) in rule {
                let s = a + (b - a) * t;
                line += (b - a) * wt * phi.value([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        // outward normal times length for a counterclockwise polygon
        acc[0] += line * (q[1] - p[1]);
        acc[1] -= line * (q[0] - p[0]);
    }
    acc
}

/// `|Σ_cells F_cell · ∫_cell ∇φ| / ‖∇φ‖_{L¹}` with the given quadrature order.
pub fn plap_residual_with(w: &PAMap, phi: &TestFunction, p: f64, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let parts: Vec<f64> = w
        .cells
        .par_iter()
        .map(|c| {
            if !phi.meets(c.poly.bbox()) {
                return 0.0;
            }
            let f = flux([c.a.m11, c.a.m12], p);
            let g = cell_grad_integral(&c.poly.verts, phi, &rule);
            f[0] * g[0] + f[1] * g[1]
        })
        .collect();
    parts.iter().sum::<f64>().abs() / phi.grad_l1()
}

/// Normalized distributional residual of the p-Laplace equation for `u = w¹` tested with `φ`.
pub fn plap_residual(w: &PAMap, phi: &TestFunction, p: f64) -> f64 {
    plap_residual_with(w, phi, p, QUAD_ORDER)
}
