//! Piecewise affine convex integration: laminates realized as oscillating Lipschitz maps on
//! convex polygons, and the level-by-level scheme producing `w_1, …, w_N`.

mod demo;
mod geometry;
mod grid;
mod induction;
mod mollify;
mod order;
mod pamap;
mod simple;

pub use demo::{demo_root, DemoSource, DEMO_I};
pub use geometry::{Point, Polygon};
pub use grid::{grid_family, grid_side, GridFamily};
pub use induction::{
    induction_step, init_map, occupancy, resume_construction_with, run_construction, run_construction_with, stage_eps, ConstructOptions, InductionState,
    LaminateSource, LevelAudit, LevelManifest, OccupancyRow, RecursionFit, RunOutcome, StaircaseSource,
};
pub use mollify::{choose_delta, mollify_bound, mollify_distance, MollifyMethod, KERNEL_MOMENT, MAX_PIXELS, PIXELS_PER_RADIUS};
pub use order::{atom_fraction_error, finite_order_map};
pub use pamap::{AffineCell, CellIndex, CellTag, PAMap};
pub use simple::{projected_cells, rank_one_factors, simple_laminate_map, Side, BARYCENTER_TOL, MAX_CELLS, RANK_TOL};

use stairlam_laminate::LaminateError;
use stairlam_staircase::StairError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Stair(#[from] StairError),
    #[error(transparent)]
    Laminate(#[from] LaminateError),
    #[error("B - C is not rank one: normalized determinant {gap:e}")]
    NotRankOne { gap: f64 },
    #[error("A is not the barycenter of the splitting: residual {residual:e}")]
    BadBarycenter { residual: f64 },
    #[error("projected {projected:.3e} cells exceed the budget of {limit:.3e}")]
    BudgetExceeded { projected: f64, limit: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("i/o failure: {0}")]
    Io(String),
}
