use rayon::prelude::*;
use stairlam_construct::{PAMap, Polygon};

/// `∫_region |Du|^q` with `u` the first component of `w`; exact since `Du` is constant per cell.
pub fn lq_energy(w: &PAMap, q: f64, region: &Polygon) -> f64 {
    let rb = region.bbox();
    let parts: Vec<f64> = w
        .cells
        .par_iter()
        .map(|c| {
            let bb = c.poly.bbox();
            if bb[2] < rb[0] || bb[0] > rb[2] || bb[3] < rb[1] || bb[1] > rb[3] {
                return 0.0;
            }
            let g = c.a.m11.hypot(c.a.m12);
            c.poly.intersect(region).area() * g.powf(q)
        })
        .collect();
    parts.iter().sum()
}

/// [`lq_energy`] over the whole domain, without clipping.
pub fn lq_energy_domain(w: &PAMap, q: f64) -> f64 {
    let parts: Vec<f64> = w.cells.par_iter().map(|c| c.poly.area() * c.a.m11.hypot(c.a.m12).powf(q)).collect();
    parts.iter().sum()
}
