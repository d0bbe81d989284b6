//! CSV tables and 16-bit PGM rasters with a JSON sidecar holding the scaling.

use crate::AnalysisError;
use serde::Serialize;
use stairlam_construct::{AffineCell, CellIndex, PAMap};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub level: usize,
    pub q: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub level: usize,
    pub bump_id: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub level: usize,
    pub cell_id: usize,
    #[serde(rename = "U1_mass")]
    pub u1_mass: f64,
    #[serde(rename = "U2_mass")]
    pub u2_mass: f64,
    #[serde(rename = "U3_mass")]
    pub u3_mass: f64,
    pub m12_min: f64,
    pub m12_max: f64,
}

/// Writes `rows` with a header line.
pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<(), AnalysisError> {
    let mut wr = csv::Writer::from_writer(out);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Row-major samples at pixel centres of the domain's bounding box, top row first; `NaN`
/// outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub bbox: [f64; 4],
    pub data: Vec<f64>,
}

/// Linear scaling of a written raster: `value = lo + (hi − lo)·(pixel − 1)/65534` for pixels
/// inside the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterMeta {
    pub field: String,
    pub width: usize,
    pub height: usize,
    pub bbox: [f64; 4],
    pub lo: f64,
    pub hi: f64,
    pub max_value: u16,
    /// Pixel value used outside the domain.
    pub outside: u16,
    pub order: &'static str,
}

/// Samples `field` of the cell under each pixel centre.
pub fn sample_field<F: Fn(&AffineCell) -> f64>(w: &PAMap, width: usize, field: F) -> Raster {
    let bb = w.domain.bbox();
    let pitch = (bb[2] - bb[0]) / width as f64;
    let height = (((bb[3] - bb[1]) / pitch).round() as usize).max(1);
    let idx = CellIndex::new(&w.cells, &w.domain);
    let tol = 1e-12 * w.domain.diameter();
    let mut data = Vec::with_capacity(width * height);
    for j in 0..height {
        let y = bb[3] - (j as f64 + 0.5) * pitch;
        for i in 0..width {
            let x = [bb[0] + (i as f64 + 0.5) * pitch, y];
            let hit = idx.candidates(x).iter().map(|&k| &w.cells[k as usize]).find(|c| c.poly.contains(x, tol));
            data.push(hit.map_or(f64::NAN, &field));
        }
    }
    Raster { width, height, bbox: bb, data }
}

/// Writes a binary 16-bit PGM and its sidecar. Finite samples map linearly onto `1..=65535`,
/// `NaN` onto 0.
pub fn write_pgm(r: &Raster, field: &str, pgm: &Path, sidecar: &Path) -> Result<RasterMeta, AnalysisError> {
    let finite = r.data.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut buf = format!("P5\n{} {}\n65535\n", r.width, r.height).into_bytes();
    for &v in &r.data {
        let px: u16 = if v.is_finite() { (1.0 + (v - lo) / span * 65534.0).round() as u16 } else { 0 };
        buf.extend_from_slice(&px.to_be_bytes());
    }
    std::fs::write(pgm, buf)?;
    let meta = RasterMeta {
        field: field.to_string(),
        width: r.width,
        height: r.height,
        bbox: r.bbox,
        lo,
        hi,
        max_value: 65535,
        outside: 0,
        order: "row-major, top row first",
    };
    std::fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
    Ok(meta)
}
