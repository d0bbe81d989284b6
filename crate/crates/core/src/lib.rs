//! Matrix algebra on 2×2 gradients, the constraint set `K_p` with its scalar
//! building blocks, and the parameter box the staircase is indexed by.

mod error;
mod kp;
mod mat;
mod params;
mod sum;
mod tag;

pub use error::CoreError;
pub use kp::{dist_to_kp, g_inverse, g_prime, h_g_eval, h_prime, kp_point, kp_second_row, radial_factor};
pub use mat::{det, rank_one_gap, Mat2};
pub use params::{choose_c, eps_auto, g_range, g_rate, gamma, threshold, validate_c, ModelParams, Params, BOX_HI, BOX_LO, C_SAMPLES};
pub use sum::Neumaier;
pub use tag::{SetKind, SetTag};
