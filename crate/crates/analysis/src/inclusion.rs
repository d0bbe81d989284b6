use serde::Serialize;
use stairlam_construct::PAMap;
use stairlam_core::dist_to_kp;

/// Per-cell distances of the gradients from `K_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub per_cell: Vec<f64>,
    /// Area-weighted mean over non-boundary-layer cells.
    pub mean: f64,
    /// Max over non-boundary-layer cells.
    pub max: f64,
}

pub fn inclusion_residual(w: &PAMap, p: f64) -> InclusionReport {
    let per_cell: Vec<f64> = w.cells.iter().map(|c| dist_to_kp(c.a, p)).collect();
    let (mut num, mut den, mut max) = (0.0, 0.0, 0.0_f64);
    for (c, d) in w.cells.iter().zip(&per_cell) {
        if c.tag.is_layer() {
            continue;
        }
        let a = c.poly.area();
        num += a * d;
        den += a;
        max = max.max(*d);
    }
    InclusionReport {
        per_cell,
        mean: if den > 0.0 { num / den } else { 0.0 },
        max,
    }
}
