//! Positivity of `δ_i z_i` over a grid and the empirical search for the starting index `I`.

use crate::asymptotics::s_ratio_deviation;
use crate::delta::{default_terms, delta_z_fd, DeltaLadder};
use crate::VerifyError;
use rayon::prelude::*;
use serde::Serialize;
use stairlam_core::{ModelParams, Params};
use stairlam_staircase::{t0_margins, Ladder, DIST_MIN};

/// `δ_i z_i` counts as positive only above this fraction of its natural scale `|z_i|/i`,
/// well clear of the series resolution.
pub const POSITIVITY_FLOOR: f64 = 1e-6;
/// Relative step of the finite-difference oracle, in units of the slope range `c`.
pub const FD_STEP: f64 = 1e-5;
/// Number of consecutive indices that must pass.
pub const RUN_LENGTH: usize = 50;
/// Largest starting index tried.
pub const SEARCH_LIMIT: usize = 1 << 14;
/// Ceiling on the ratio-law deviation at the starting index.
pub const START_RATIO_TOL: f64 = 0.2;
/// `ℓ` window of the ratio law, as a multiple of `i`.
pub const L_FACTOR: usize = 32;

/// Outcome of a scan of `δ_i z_i` over a grid and an index range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeScan {
    pub i_range: (usize, usize),
    pub evaluations: usize,
    /// `min δ_i z_i · i^{1−2(p−2)}`, the fitted `C′`.
    pub min_scaled: f64,
    /// `min δ_i z_i · i/|z_i|`.
    pub min_ratio: f64,
    /// Largest relative gap to the finite-difference oracle (0 when not run).
    pub fd_max_rel: f64,
    /// `(i, P)` of the smallest `min_ratio`.
    pub worst: Option<(usize, Params)>,
    pub all_positive: bool,
}

/// Evaluates `δ_i z_i` for every `P` in `grid` and `i ∈ [lo, hi]`, optionally against the
/// finite-difference oracle. With `stop_early`, returns at the first non-positive value.
pub fn scan_delta(p: f64, c: f64, grid: &[Params], lo: usize, hi: usize, with_fd: bool, stop_early: bool) -> Result<DerivativeScan, VerifyError> {
    let expo = 1.0 - 2.0 * (p - 2.0);
    let h = FD_STEP * c;
    let one = |pr: &Params| -> Result<(f64, f64, f64, Option<(usize, Params)>, usize), VerifyError> {
        let mut lad = DeltaLadder::new(*pr, p);
        lad.extend_to(default_terms(hi))?;
        let (mut ms, mut mr, mut fd, mut worst, mut count) = (f64::INFINITY, f64::INFINITY, 0.0_f64, None, 0);
        for i in lo..=hi {
            let n = default_terms(i);
            let v = lad.fixed(i, n);
            count += 1;
            let ratio = v.dz * i as f64 / v.z.abs();
            ms = ms.min(v.dz * (i as f64).powf(expo));
            if ratio < mr || !ratio.is_finite() {
                mr = if ratio.is_finite() { ratio } else { f64::NEG_INFINITY };
                worst = Some((i, *pr));
            }
            if with_fd {
                let f = delta_z_fd(lad.ladder(), i, n, h);
                fd = fd.max((f - v.dz).abs() / v.dz.abs());
            }
            if stop_early && !(ratio > POSITIVITY_FLOOR) {
                break;
            }
        }
        Ok((ms, mr, fd, worst, count))
    };
    let results: Vec<_> = if stop_early {
        // sequential so that the first failure ends the scan
        let mut out = Vec::new();
        for pr in grid {
            let r = one(pr)?;
            let fail = !(r.1 > POSITIVITY_FLOOR);
            out.push(r);
            if fail {
                break;
            }
        }
        out
    } else {
        grid.par_iter().map(one).collect::<Result<_, _>>()?
    };
    let mut scan = DerivativeScan {
        i_range: (lo, hi),
        evaluations: 0,
        min_scaled: f64::INFINITY,
        min_ratio: f64::INFINITY,
        fd_max_rel: 0.0,
        worst: None,
        all_positive: true,
    };
    for (ms, mr, fd, worst, count) in results {
        scan.evaluations += count;
        scan.min_scaled = scan.min_scaled.min(ms);
        scan.fd_max_rel = scan.fd_max_rel.max(fd);
        if mr < scan.min_ratio || scan.worst.is_none() {
            scan.min_ratio = scan.min_ratio.min(mr);
            scan.worst = worst;
        }
    }
    scan.all_positive = scan.min_ratio > POSITIVITY_FLOOR;
    Ok(scan)
}

/// Results of the four checks at one candidate starting index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartChecks {
    pub i_start: usize,
    /// Positivity of `δ_i z_i` on the grid for `RUN_LENGTH` consecutive indices.
    pub positivity: Option<bool>,
    pub min_ratio: Option<f64>,
    /// Separation between images of different indices.
    pub separation: Option<bool>,
    pub index_gap: Option<f64>,
    /// Sign conditions at `t0`.
    pub sign: Option<bool>,
    pub min_sign: Option<f64>,
    /// Ratio-law deviation at the start.
    pub ratio_law: Option<bool>,
    pub ratio_deviation: Option<f64>,
}

impl StartChecks {
    pub fn passed(&self) -> bool {
        [self.positivity, self.separation, self.sign, self.ratio_law].iter().all(|c| *c == Some(true))
    }
}

/// Runs the checks at `i_start`, cheapest first, stopping at the first failure. A single-point
/// positivity screen at the grid's first point runs before the rest.
pub fn check_start_index(model: &ModelParams, grid: &[Params], i_start: usize) -> Result<StartChecks, VerifyError> {
    let (p, c) = (model.p, model.c);
    let hi = i_start + RUN_LENGTH - 1;
    let mut out = StartChecks {
        i_start,
        positivity: None,
        min_ratio: None,
        separation: None,
        index_gap: None,
        sign: None,
        min_sign: None,
        ratio_law: None,
        ratio_deviation: None,
    };
    if let Some(first) = grid.first() {
        let screen = scan_delta(p, c, std::slice::from_ref(first), i_start, i_start, false, true)?;
        if !screen.all_positive {
            out.positivity = Some(false);
            out.min_ratio = Some(screen.min_ratio);
            return Ok(out);
        }
    }
    let dev = grid
        .par_iter()
        .map(|pr| {
            let mut lad = Ladder::new(*pr, p);
            lad.extend_to(i_start * L_FACTOR)?;
            Ok(s_ratio_deviation(&lad, i_start, L_FACTOR).0)
        })
        .collect::<Result<Vec<f64>, VerifyError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.ratio_deviation = Some(dev);
    out.ratio_law = Some(dev <= START_RATIO_TOL);
    if out.ratio_law != Some(true) {
        return Ok(out);
    }
    let margins = t0_margins(model, i_start, hi, grid)?;
    out.min_sign = Some(margins.min_sign());
    out.sign = Some(margins.min_sign() > 0.0);
    out.index_gap = Some(margins.index_gap);
    out.separation = Some(margins.index_gap >= DIST_MIN);
    if out.sign != Some(true) || out.separation != Some(true) {
        return Ok(out);
    }
    let scan = scan_delta(p, c, grid, i_start, hi, false, true)?;
    out.min_ratio = Some(scan.min_ratio);
    out.positivity = Some(scan.all_positive);
    Ok(out)
}

/// Smallest `I` in the doubling schedule `2, 4, …, 2¹⁴` passing every check, with the
/// record of every candidate tried.
pub fn empirical_i(model: &ModelParams, grid: &[Params]) -> Result<(usize, Vec<StartChecks>), VerifyError> {
    let mut log = Vec::new();
    let mut cand = 2;
    while cand <= SEARCH_LIMIT {
        let ch = check_start_index(model, grid, cand)?;
        let ok = ch.passed();
        log.push(ch);
        if ok {
            return Ok((cand, log));
        }
        cand *= 2;
    }
    Err(VerifyError::SearchExhausted { limit: SEARCH_LIMIT })
}
