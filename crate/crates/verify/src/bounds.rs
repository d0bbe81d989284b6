//! Quantitative bounds on laminate weights and masses, and the moment dichotomy of the
//! staircase laminates.

use crate::report::{loglog_slope, AsymptoticReport};
use crate::VerifyError;
use rayon::prelude::*;
use serde::Serialize;
use stairlam_core::{gamma, ModelParams, Params, SetTag};
use stairlam_staircase::{t_q, Stair, StairFrame, Step};

/// Largest admissible `k2/k1` for the first two weights.
pub const WEIGHT_BAND: f64 = 10.0;
/// Relative tolerance on the decay exponent of the `A`-atom mass.
pub const SLOPE_REL_TOL: f64 = 0.2;

fn bare(i: usize, pr: &Params, p: f64) -> Result<StairFrame, VerifyError> {
    Ok(StairFrame::new(*pr, p, Step::at(i, pr, p)?, 0.0, 0.0))
}

/// Weight bands of `ν_{i,q}`, the exponential bound on its third weight, the deficit of the
/// boundary laminates' main atom, and the decay of the `A`-atom mass along the staircase.
///
/// The constant in the third-weight bound is fitted at `i_range.0` only and then validated
/// on the whole range. The `A`-atom decay is read off `staircase_laminate(I, I+n, I+n)` at the
/// points `a_atom_grid` for `n ∈ ns`, against `ln(I + n)`.
pub fn check_weight_and_mass_bounds(
    model: &ModelParams,
    i_range: (usize, usize),
    qs: &[usize],
    grid: &[Params],
    a_atom_grid: &[Params],
    ns: &[usize],
) -> Result<AsymptoticReport, VerifyError> {
    let p = model.p;
    let (lo, hi) = i_range;
    let gam = gamma(p);
    let (min_g, _) = model.g_bounds();
    let mut rep = AsymptoticReport::new("weights", i_range, SLOPE_REL_TOL);

    // (i, λ¹·i, λ²·i, ln λ³) for every grid point, index and q
    let samples: Vec<Vec<(usize, f64, f64, f64)>> = grid
        .par_iter()
        .map(|pr| {
            let mut v = Vec::new();
            for i in lo..=hi {
                let f = bare(i, pr, p)?;
                for &q in qs {
                    let (l1, l2, l3) = f.base_weights(t_q(q, model.t0));
                    v.push((i, l1 * i as f64, l2 * i as f64, l3.ln()));
                }
            }
            Ok(v)
        })
        .collect::<Result<_, VerifyError>>()?;
    let flat: Vec<&(usize, f64, f64, f64)> = samples.iter().flatten().collect();

    for (name, sel) in [("lambda1", 1usize), ("lambda2", 2)] {
        let vals = flat.iter().map(|s| if sel == 1 { s.1 } else { s.2 });
        let (k1, k2) = vals.fold((f64::INFINITY, 0.0_f64), |(a, b), x| (a.min(x), b.max(x)));
        rep.fit(&format!("{name}_k1"), k1);
        rep.fit(&format!("{name}_k2"), k2);
        let ok = k1 > 0.0 && k2 / k1 < WEIGHT_BAND;
        rep.row(name, lo, hi, k2 / k1, k1, ok);
        rep.gate(0.0, ok, format!("{name}·i spans [{k1:.4}, {k2:.4}], ratio not below {WEIGHT_BAND}"));
    }

    // third weight: ln λ³ ≤ C/i^γ − 2 min G/i, C fitted at i = lo
    let resid = |s: &(usize, f64, f64, f64)| (s.3 + 2.0 * min_g / s.0 as f64) * (s.0 as f64).powf(gam);
    let c3 = flat.iter().filter(|s| s.0 == lo).map(|s| resid(s)).fold(f64::NEG_INFINITY, f64::max);
    rep.fit("lambda3_C", c3);
    let mut worst = f64::NEG_INFINITY;
    for i in lo..=hi {
        let r = flat.iter().filter(|s| s.0 == i).map(|s| resid(s)).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(r - c3);
        rep.row("lambda3", i, 0, r, c3, r <= c3 + 1e-9 * c3.abs().max(1.0));
    }
    rep.gate(
        0.0,
        worst <= 1e-9 * c3.abs().max(1.0),
        format!("third weight exceeds the bound fitted at i = {lo} by {worst:.3e}"),
    );

    // boundary laminates: 2^q (1 − μ) ≤ C, C fitted at the first q
    let mut deficits: Vec<(usize, f64)> = Vec::new();
    for pr in grid {
        let f = bare(lo, pr, p)?;
        let l = f.lambdas();
        for &q in qs {
            // t_{q+1} − t_q = (1 − t0)/2^{q+1} exactly; the deficits are formed from it directly
            // because 1 − t_q/t_{q+1} is below double resolution once q exceeds about 50
            let tq1 = t_q(q + 1, model.t0);
            let half_gap = 0.5 * (1.0 - model.t0);
            let d1 = half_gap / tq1;
            let d2 = half_gap * l.lc / (l.ld + tq1 * l.lc);
            deficits.push((q, d1.max(d2)));
        }
    }
    if let Some(&q0) = qs.first() {
        let cmu = deficits.iter().filter(|d| d.0 == q0).map(|d| d.1).fold(0.0, f64::max);
        rep.fit("mu2_C", cmu);
        let over = deficits.iter().map(|d| d.1 - cmu).fold(f64::NEG_INFINITY, f64::max);
        for &q in qs {
            let v = deficits.iter().filter(|d| d.0 == q).map(|d| d.1).fold(0.0, f64::max);
            rep.row("mu2", lo, q, v, cmu, v <= cmu * (1.0 + 1e-9));
        }
        rep.gate(0.0, over <= cmu * 1e-9, format!("boundary deficit exceeds C/2^q by {over:.3e}"));
    }

    // A-atom mass of staircase_laminate(I, I+n, I+n)
    let target = -2.0 * min_g;
    let i0 = model.i_start;
    let top = i0 + ns.iter().copied().max().unwrap_or(1);
    for pr in a_atom_grid {
        let stair = Stair::new(*pr, *model, top + 1)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in ns {
            let lam = stair.staircase_laminate(i0, i0 + n, i0 + n)?;
            let m = lam.mass_tagged(SetTag::u3(i0 + n));
            xs.push((i0 + n) as f64);
            ys.push(m);
            rep.row("a_atom_mass", i0, n, m, target, true);
        }
        let slope = loglog_slope(&xs, &ys);
        let rel = (slope / target - 1.0).abs();
        rep.fit("a_atom_slope", slope);
        rep.gate(rel, rel <= SLOPE_REL_TOL, format!("A-atom slope {slope:.4} is not within 20% of {target:.4}"));
    }
    Ok(rep)
}

/// Moments of `staircase_laminate(I, I+n, I+n)` at the low and high exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub ns: Vec<usize>,
    pub low_exponent: f64,
    pub high_exponent: f64,
    pub low_moments: Vec<f64>,
    pub high_moments: Vec<f64>,
    pub a_atom_masses: Vec<f64>,
    /// `|m_low(last)/m_low(first) − 1|`.
    pub low_variation: f64,
    /// `m_high(last)/m_high(first) − 1`.
    pub high_growth: f64,
    pub a_atom_slope: f64,
    pub target_slope: f64,
    pub pass: bool,
}

/// Moment dichotomy at one `P`: the `1+eps` moment varies by at most 10% across `ns`, the
/// `p/(p−1)` moment grows by at least 50%, and the `A`-atom mass decays with slope
/// `−2 min G_p` within 20% against `ln(I + n)`.
pub fn check_measure_dichotomy(model: &ModelParams, pr: &Params, ns: &[usize]) -> Result<DichotomyReport, VerifyError> {
    if ns.len() < 2 {
        return Err(VerifyError::Precondition("the dichotomy needs at least two values of n".into()));
    }
    let i0 = model.i_start;
    let top = i0 + ns.iter().copied().max().unwrap_or(1);
    let stair = Stair::new(*pr, *model, top + 1)?;
    let low = 1.0 + model.eps;
    let high = model.p / (model.p - 1.0);
    let (mut lm, mut hm, mut am, mut xs) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &n in ns {
        let lam = stair.staircase_laminate(i0, i0 + n, i0 + n)?;
        lm.push(lam.moment(low));
        hm.push(lam.moment(high));
        am.push(lam.mass_tagged(SetTag::u3(i0 + n)));
        xs.push((i0 + n) as f64);
    }
    let last = ns.len() - 1;
    let low_variation = (lm[last] / lm[0] - 1.0).abs();
    let high_growth = hm[last] / hm[0] - 1.0;
    let a_atom_slope = loglog_slope(&xs, &am);
    let target_slope = -2.0 * model.g_bounds().0;
    let pass = low_variation <= 0.1 && high_growth >= 0.5 && (a_atom_slope / target_slope - 1.0).abs() <= SLOPE_REL_TOL;
    Ok(DichotomyReport {
        ns: ns.to_vec(),
        low_exponent: low,
        high_exponent: high,
        low_moments: lm,
        high_moments: hm,
        a_atom_masses: am,
        low_variation,
        high_growth,
        a_atom_slope,
        target_slope,
        pass,
    })
}
