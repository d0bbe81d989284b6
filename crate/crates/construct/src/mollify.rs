//! Discrete `W^{1,1}` distance between a map and its mollification.
//!
//! The map is extended by its boundary affine datum outside the domain, rasterized at pitch
//! `δ/4`, and convolved with the normalized radial bump `(1 − r²/δ²)³`. Affine data are
//! reproduced exactly by a symmetric kernel, so only the neighbourhood of the domain counts.

use crate::pamap::PAMap;
use crate::ConstructError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest raster the distance is evaluated on.
pub const MAX_PIXELS: usize = 1 << 22;
/// Raster pixels per kernel radius.
pub const PIXELS_PER_RADIUS: usize = 4;

struct Raster {
    nx: usize,
    ny: usize,
    /// Per pixel: `w` (2 entries) then `Dw` (4 entries).
    data: Vec<[f64; 6]>,
}

fn rasterize(w: &PAMap, x0: f64, y0: f64, pitch: f64, nx: usize, ny: usize) -> Raster {
    let (m, b0) = w.boundary_affine;
    let g = m.to_array();
    let mut data = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = [x0 + (i as f64 + 0.5) * pitch, y0 + (j as f64 + 0.5) * pitch];
            let v = m.apply(x);
            data.push([v[0] + b0[0], v[1] + b0[1], g[0], g[1], g[2], g[3]]);
        }
    }
    for c in &w.cells {
        let bb = c.poly.bbox();
        let i0 = ((bb[0] - x0) / pitch - 0.5).ceil().max(0.0) as usize;
        let i1 = (((bb[2] - x0) / pitch - 0.5).floor().max(-1.0) + 1.0) as usize;
        let j0 = ((bb[1] - y0) / pitch - 0.5).ceil().max(0.0) as usize;
        let j1 = (((bb[3] - y0) / pitch - 0.5).floor().max(-1.0) + 1.0) as usize;
        let ga = c.a.to_array();
        for j in j0..j1.min(ny) {
            for i in i0..i1.min(nx) {
                let x = [x0 + (i as f64 + 0.5) * pitch, y0 + (j as f64 + 0.5) * pitch];
                if c.poly.contains(x, 0.0) {
                    let v = c.eval(x);
                    data[j * nx + i] = [v[0], v[1], ga[0], ga[1], ga[2], ga[3]];
                }
            }
        }
    }
    Raster { nx, ny, data }
}

fn pixels_for(w: &PAMap, delta: f64) -> (f64, f64, f64, usize, usize) {
    let pitch = delta / PIXELS_PER_RADIUS as f64;
    let bb = w.domain.bbox();
    let pad = 2.0 * delta + pitch;
    let nx = ((bb[2] - bb[0] + 2.0 * pad) / pitch).ceil() as usize;
    let ny = ((bb[3] - bb[1] + 2.0 * pad) / pitch).ceil() as usize;
    (bb[0] - pad, bb[1] - pad, pitch, nx, ny)
}

/// `‖w ⋆ ρ_δ − w‖_{W^{1,1}}` on the raster.
pub fn mollify_distance(w: &PAMap, delta: f64) -> Result<f64, ConstructError> {
    if !(delta > 0.0) {
        return Err(ConstructError::Precondition(format!("mollification radius must be positive, got {delta}")));
    }
    let (x0, y0, pitch, nx, ny) = pixels_for(w, delta);
    if nx * ny > MAX_PIXELS {
        return Err(ConstructError::BudgetExceeded {
            projected: (nx * ny) as f64,
            limit: MAX_PIXELS as f64,
        });
    }
    let r = rasterize(w, x0, y0, pitch, nx, ny);
    let rad = PIXELS_PER_RADIUS as isize;
    let mut kernel = Vec::new();
    for dj in -rad..=rad {
        for di in -rad..=rad {
            let q = ((di * di + dj * dj) as f64) / (rad * rad) as f64;
            if q < 1.0 {
                kernel.push((di, dj, (1.0 - q).powi(3)));
            }
        }
    }
    let norm: f64 = kernel.iter().map(|k| k.2).sum();
    let margin = rad as usize;
    let rows: Vec<f64> = (margin..r.ny - margin)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for i in margin..r.nx - margin {
                let mut conv = [0.0; 6];
                for &(di, dj, wgt) in &kernel {
                    let p = &r.data[(j as isize + dj) as usize * r.nx + (i as isize + di) as usize];
                    for k in 0..6 {
                        conv[k] += wgt * p[k];
                    }
                }
                let here = &r.data[j * r.nx + i];
                let mut d = [0.0; 6];
                for k in 0..6 {
                    d[k] = conv[k] / norm - here[k];
                }
                acc += d[0].hypot(d[1]) + (d[2] * d[2] + d[3] * d[3] + d[4] * d[4] + d[5] * d[5]).sqrt();
            }
            acc
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * pitch * pitch)
}

/// First absolute moment `∫|z| ρ(z) dz` of the unit-radius kernel `(1 − |z|²)³`.
pub const KERNEL_MOMENT: f64 = 128.0 / 315.0;

/// Upper bound on `‖w ⋆ ρ_δ − w‖_{W^{1,1}}` for the continuous kernel. With `u = w − M x − b0`,
/// both `‖u ⋆ ρ_δ − u‖_{L¹} ≤ δ m₁ ‖Du‖_{L¹}` and `‖Du ⋆ ρ_δ − Du‖_{L¹} ≤ δ m₁ |D²u|`, and the
/// jump part of `|D²u|` is at most `Σ |A_c − M| · perimeter(c)`.
pub fn mollify_bound(w: &PAMap, delta: f64) -> f64 {
    let m = w.boundary_affine.0;
    let s: f64 = w.cells.iter().map(|c| (c.a - m).norm() * (c.poly.area() + c.poly.perimeter())).sum();
    delta * KERNEL_MOMENT * s
}

/// How a mollification distance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MollifyMethod {
    Raster,
    /// The raster would exceed [`MAX_PIXELS`]; the analytic bound was used.
    Bound,
}

/// Largest dyadic `δ < upper` whose mollification distance is at most `target`: measured on
/// the raster while it fits, bounded analytically below that.
pub fn choose_delta(w: &PAMap, upper: f64, target: f64) -> Result<(f64, f64, MollifyMethod), ConstructError> {
    let mut delta = 2f64.powi(upper.log2().floor() as i32);
    if delta >= upper {
        delta *= 0.5;
    }
    loop {
        let (d, how) = match mollify_distance(w, delta) {
            Ok(d) => (d, MollifyMethod::Raster),
            Err(ConstructError::BudgetExceeded { .. }) => (mollify_bound(w, delta), MollifyMethod::Bound),
            Err(e) => return Err(e),
        };
        if d <= target {
            return Ok((delta, d, how));
        }
        if delta < 1e-300 {
            return Err(ConstructError::Precondition("no mollification radius meets the target".into()));
        }
        delta *= 0.5;
    }
}
