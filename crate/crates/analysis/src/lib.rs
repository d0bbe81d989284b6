//! Measurements on constructed maps: energies, distributional p-Laplace residuals against
//! polynomial bumps, distance of the gradients from `K_p`, per-cell gradient statistics and
//! table/raster export.

mod bump;
mod energy;
mod export;
mod inclusion;
mod residual;
mod stats;

pub use bump::{bump_battery, TestFunction};
pub use energy::{lq_energy, lq_energy_domain};
pub use export::{sample_field, write_csv, write_pgm, EnergyRow, Raster, RasterMeta, ResidualRow, WitnessRow};
pub use inclusion::{inclusion_residual, InclusionReport};
pub use residual::{gauss_legendre, plap_residual, plap_residual_with, QUAD_ORDER};
pub use stats::{grad_statistics, CellStats, GradReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("test function at {center:?} with radius {radius} leaves the domain")]
    Support { center: [f64; 2], radius: f64 },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}
