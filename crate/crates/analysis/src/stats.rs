use serde::Serialize;
use stairlam_construct::{CellTag, GridFamily, PAMap};
use stairlam_core::SetKind;
use stairlam_staircase::sign_margin;

/// Area carried by each lineage in one reference cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub cell: usize,
    pub area: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub layer: f64,
    pub other: f64,
    pub m12_min: f64,
    pub m12_max: f64,
}

/// Gradient statistics over a reference grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradReport {
    pub cells: Vec<CellStats>,
    pub m12_range: (f64, f64),
    /// `min_j min(|U¹ ∩ Ω_j|, |U² ∩ Ω_j|) / |Ω_j|`.
    pub witness: f64,
    /// Tagged `U¹`/`U²` cells whose gradient breaks the sign condition of its family.
    pub separation_violations: usize,
}

/// Sorts the cells of `w` into the cells of `reference` by centroid.
pub fn grad_statistics(w: &PAMap, reference: &GridFamily) -> GradReport {
    let mut cells: Vec<CellStats> = reference
        .cells
        .iter()
        .enumerate()
        .map(|(k, c)| CellStats {
            cell: k,
            area: c.2.area(),
            u1: 0.0,
            u2: 0.0,
            u3: 0.0,
            layer: 0.0,
            other: 0.0,
            m12_min: f64::INFINITY,
            m12_max: f64::NEG_INFINITY,
        })
        .collect();
    let mut violations = 0;
    for c in &w.cells {
        let Some(j) = reference.locate(c.poly.centroid()) else { continue };
        let row = &mut cells[j];
        let a = c.poly.area();
        row.m12_min = row.m12_min.min(c.a.m12);
        row.m12_max = row.m12_max.max(c.a.m12);
        match c.tag {
            CellTag::BoundaryLayer => row.layer += a,
            CellTag::Set(t) => {
                match t.kind {
                    SetKind::U1 => row.u1 += a,
                    SetKind::U2 => row.u2 += a,
                    SetKind::U3 => row.u3 += a,
                }
                if t.kind != SetKind::U3 && sign_margin(c.a, t.kind) <= 0.0 {
                    violations += 1;
                }
            }
            CellTag::Untagged => row.other += a,
        }
    }
    let m12_range = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |r, c| (r.0.min(c.m12_min), r.1.max(c.m12_max)));
    let witness = cells.iter().map(|c| c.u1.min(c.u2) / c.area).fold(f64::INFINITY, f64::min);
    GradReport {
        cells,
        m12_range,
        witness,
        separation_violations: violations,
    }
}
