//! The full check battery at a resolved model.

use crate::asymptotics::{check_claim_main, check_primitive_asymptotics, check_s_asymptotic};
use crate::bounds::{check_measure_dichotomy, check_weight_and_mass_bounds, DichotomyReport};
use crate::index::{empirical_i, scan_delta, DerivativeScan, StartChecks, L_FACTOR, RUN_LENGTH};
use crate::report::{doubling_chain, AsymptoticReport};
use crate::VerifyError;
use rayon::prelude::*;
use serde::Serialize;
use stairlam_core::{ModelParams, Params};
use stairlam_staircase::Ladder;

/// Interior lattice fractions of the standard `5⁴` grid.
pub const GRID_FRACTIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Required agreement between the derivative series and finite differences.
pub const FD_TOL: f64 = 1e-5;
/// Largest allowed spread of `|z_i| i^{−2(p−2)}` over `[I, I+100]`.
pub const Z_BAND: f64 = 3.0;

pub fn standard_grid(c: f64) -> Vec<Params> {
    Params::lattice(c, &GRID_FRACTIONS)
}

/// Spread `max/min` of `|z_i| i^{−2(p−2)}` over the grid and `[lo, hi]`, with the extremes.
pub fn z_growth_band(model: &ModelParams, grid: &[Params], lo: usize, hi: usize) -> Result<(f64, f64, f64), VerifyError> {
    let p = model.p;
    let vals: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|pr| {
            let mut lad = Ladder::new(*pr, p);
            let z = lad.z_profile(hi, model.tol_series)?;
            let mut mn = f64::INFINITY;
            let mut mx = 0.0_f64;
            for (i, zi) in z.iter().enumerate().take(hi + 1).skip(lo) {
                let v = zi.abs() * (i as f64).powf(-2.0 * (p - 2.0));
                mn = mn.min(v);
                mx = mx.max(v);
            }
            Ok((mn, mx))
        })
        .collect::<Result<_, VerifyError>>()?;
    let mn = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let mx = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok((mx / mn, mn, mx))
}

/// Everything the battery measured.
#[derive(Debug, Clone, Serialize)]
pub struct Battery {
    pub model: ModelParams,
    pub empirical_i: Option<usize>,
    pub start_checks: Vec<StartChecks>,
    pub derivative: Option<DerivativeScan>,
    pub z_band: Option<(f64, f64, f64)>,
    pub reports: Vec<AsymptoticReport>,
    pub dichotomy: Option<DichotomyReport>,
    pub failures: Vec<String>,
}

impl Battery {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check at `model` on the standard grid. The search for `I` runs first; when it
/// is exhausted the remaining checks are skipped and the battery fails.
pub fn run_battery(model: &ModelParams) -> Result<Battery, VerifyError> {
    let grid = standard_grid(model.c);
    let mut b = Battery {
        model: *model,
        empirical_i: None,
        start_checks: Vec::new(),
        derivative: None,
        z_band: None,
        reports: Vec::new(),
        dichotomy: None,
        failures: Vec::new(),
    };
    match empirical_i(model, &grid) {
        Ok((i, log)) => {
            b.empirical_i = Some(i);
            b.start_checks = log;
            if i > model.i_start {
                b.failures.push(format!("configured I = {} is below the empirical I = {i}", model.i_start));
            }
        }
        Err(VerifyError::SearchExhausted { limit }) => {
            b.failures
                .push(format!("no starting index up to {limit} passes; positivity of the derivative series fails"));
            return Ok(b);
        }
        Err(e) => return Err(e),
    }
    let i0 = model.i_start;

    let scan = scan_delta(model.p, model.c, &grid, i0, i0 + RUN_LENGTH, true, false)?;
    if !scan.all_positive {
        b.failures
            .push(format!("derivative series not positive: min δz·i/|z| = {:.3e}", scan.min_ratio));
    }
    if !(scan.fd_max_rel <= FD_TOL) {
        b.failures
            .push(format!("derivative series and finite differences differ by {:.3e}", scan.fd_max_rel));
    }
    b.derivative = Some(scan);

    let band = z_growth_band(model, &grid, i0, i0 + 100)?;
    if !(band.0 < Z_BAND) {
        b.failures.push(format!("z growth band {:.3} is not below {Z_BAND}", band.0));
    }
    b.z_band = Some(band);

    let mut reports = vec![
        check_s_asymptotic(model, &doubling_chain(i0, 3), L_FACTOR, &grid)?,
        check_claim_main(model, &doubling_chain(i0, 7), &grid)?,
        check_primitive_asymptotics(model, &grid, &doubling_chain(i0, 7))?,
        check_weight_and_mass_bounds(model, (i0, i0 + 100), &[i0, i0 + 10, i0 + 50], &grid, &[Params::center(model.c)], &DICHOTOMY_NS)?,
    ];
    for r in &reports {
        if !r.pass {
            b.failures.push(format!("{}: {}", r.quantity, r.notes.join("; ")));
        }
    }
    b.reports.append(&mut reports);

    let d = check_measure_dichotomy(model, &Params::center(model.c), &DICHOTOMY_NS)?;
    if !d.pass {
        b.failures.push(format!(
            "moment dichotomy: low variation {:.3}, high growth {:.3}, slope {:.3} vs {:.3}",
            d.low_variation, d.high_growth, d.a_atom_slope, d.target_slope
        ));
    }
    b.dichotomy = Some(d);
    Ok(b)
}

/// Staircase lengths of the moment dichotomy.
pub const DICHOTOMY_NS: [usize; 5] = [20, 25, 30, 35, 40];
