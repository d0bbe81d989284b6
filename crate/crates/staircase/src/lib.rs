//! Every quantity indexed by a point `P` of the parameter box: the sequences `x_i, y_i`,
//! the series `z_i`, the endpoint matrices, interpolation maps `Φ`, target sets and the
//! laminates assembled from them.

mod error;
mod frame;
mod ladder;
mod laminates;
mod membership;
mod seq;
mod sets;
mod table;

pub use error::StairError;
pub use frame::{Lambdas, StairFrame};
pub use ladder::{tail_sum, Ladder, SeriesValue, Step, MAX_TERMS};
pub use laminates::Stair;
pub use membership::{invert, membership};
pub use seq::{dy, sequences, t_q, y_exponent};
pub use sets::{design_t0, sign_margin, t0_margins, v_n_tags, SignMargins, DIST_MIN};
pub use stairlam_core::{SetKind, SetTag};
pub use table::write_endpoint_table;

use stairlam_core::{ModelParams, Params};

/// `S_i / S_ℓ` from a fresh sum of log factors.
pub fn s_ratio(i: usize, l: usize, params: &Params, model: &ModelParams) -> Result<f64, StairError> {
    if l < i {
        return Err(StairError::Precondition(format!("S ratio needs l >= i, got i = {i}, l = {l}")));
    }
    let mut acc = 0.0;
    for k in (i + 1)..=l {
        acc += Step::at(k, params, model.p)?.log_s;
    }
    Ok((-acc).exp())
}

/// The two addends `(H¹_ℓ, H²_ℓ)`.
pub fn h_terms(l: usize, params: &Params, model: &ModelParams) -> Result<(f64, f64), StairError> {
    if l == 0 {
        return Err(StairError::Precondition("H terms start at l = 1".into()));
    }
    let s = Step::at(l, params, model.p)?;
    Ok((s.h1, s.h2))
}

/// `z_i(P)` from the series with adaptive truncation.
pub fn z_series(i: usize, params: &Params, model: &ModelParams) -> Result<f64, StairError> {
    let mut lad = Ladder::new(*params, model.p);
    Ok(lad.z_series(i, model.tol_series)?.value)
}

/// `(A_i, B_i, E_i, C_i, D_i, v_i)`.
pub fn endpoints(i: usize, params: &Params, model: &ModelParams) -> Result<StairFrame, StairError> {
    Stair::new(*params, *model, i)?.frame(i)
}

pub fn lambdas(i: usize, params: &Params, model: &ModelParams) -> Result<Lambdas, StairError> {
    Ok(endpoints(i, params, model)?.lambdas())
}

/// `Φ^k_{i,t}(P)`.
pub fn phi(k: u8, i: usize, t: f64, params: &Params, model: &ModelParams) -> Result<stairlam_core::Mat2, StairError> {
    endpoints(i, params, model)?.phi(k, t)
}
