//! Numerical checks of the analytic machinery behind the staircase: the derivative series
//! `δ_i z_i`, the asymptotic laws of its ingredients, the weight bounds, and the empirical
//! choice of the starting index `I`.

mod asymptotics;
mod battery;
mod bounds;
mod delta;
mod index;
mod report;

pub use asymptotics::{
    check_claim_main, check_primitive_asymptotics, check_s_asymptotic, claim_main_residual, ginv_drift, primitive_pairs, s_ratio_deviation, ClaimForm,
};
pub use battery::{run_battery, standard_grid, z_growth_band, Battery, DICHOTOMY_NS, FD_TOL, GRID_FRACTIONS, Z_BAND};
pub use bounds::{check_measure_dichotomy, check_weight_and_mass_bounds, DichotomyReport, SLOPE_REL_TOL, WEIGHT_BAND};
pub use delta::{default_terms, delta_z_fd, delta_z_series, g_rate_slope, DeltaCoeffs, DeltaLadder, DeltaValue};
pub use index::{
    check_start_index, empirical_i, scan_delta, DerivativeScan, StartChecks, FD_STEP, L_FACTOR, POSITIVITY_FLOOR, RUN_LENGTH, SEARCH_LIMIT, START_RATIO_TOL,
};
pub use report::{decreasing, doubling_chain, loglog_slope, write_report_csv, AsymptoticReport, ReportRow, SIM_TOL, SLOPE_TOL};

use stairlam_core::CoreError;
use stairlam_staircase::StairError;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Stair(#[from] StairError),
    #[error("series at i = {i} did not settle within {terms} terms")]
    NonConvergence { i: usize, terms: usize },
    #[error("no starting index up to {limit} passes every check")]
    SearchExhausted { limit: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("i/o: {0}")]
    Io(String),
}
