//! Asymptotic laws of the ingredients of `z_i`: the ratio law for `S_i/S_ℓ`, the leading
//! behaviour of the `x` increments, of `g_w⁻¹(y_k)`, and of the five primitive quantities
//! entering `δ_i z_i`.

use crate::report::{decreasing, loglog_slope, AsymptoticReport, SIM_TOL, SLOPE_TOL};
use crate::VerifyError;
use rayon::prelude::*;
use stairlam_core::{g_prime, g_rate, gamma, ModelParams, Params};
use stairlam_staircase::{Ladder, Step};

/// `max over ℓ ∈ (i, i·l_factor] of |(S_i/S_ℓ)(ℓ/(i+1))^{2G_p(a)} − 1|` at one `P`, with the
/// maximizing `ℓ`.
pub fn s_ratio_deviation(lad: &Ladder, i: usize, l_factor: usize) -> (f64, usize) {
    let two_g = 2.0 * g_rate(lad.params.a, lad.p);
    let mut worst = (0.0, i + 1);
    for l in (i + 1)..=(i * l_factor).max(i + 1) {
        let d = (lad.ratio(i, l) * (l as f64 / (i + 1) as f64).powf(two_g) - 1.0).abs();
        if d > worst.0 {
            worst = (d, l);
        }
    }
    worst
}

/// Ratio law for `S_i/S_ℓ` along the index chain; passes when the deviation at the last
/// index is below [`SIM_TOL`] and the chain decreases with at most one inversion.
pub fn check_s_asymptotic(model: &ModelParams, chain: &[usize], l_factor: usize, grid: &[Params]) -> Result<AsymptoticReport, VerifyError> {
    let top = chain.iter().copied().max().unwrap_or(1) * l_factor.max(1);
    let per_p: Vec<Vec<(f64, usize)>> = grid
        .par_iter()
        .map(|pr| {
            let mut lad = Ladder::new(*pr, model.p);
            lad.extend_to(top)?;
            Ok(chain.iter().map(|&i| s_ratio_deviation(&lad, i, l_factor)).collect())
        })
        .collect::<Result<_, VerifyError>>()?;
    let mut rep = AsymptoticReport::new("S_ratio", range(chain), SIM_TOL);
    let mut devs = Vec::with_capacity(chain.len());
    for (k, &i) in chain.iter().enumerate() {
        let (d, l) = per_p.iter().map(|v| v[k]).fold((0.0, i + 1), |acc, x| if x.0 > acc.0 { x } else { acc });
        rep.row("S_ratio", i, l, d, d * (i + 1) as f64, true);
        devs.push(d);
    }
    finish_chain(&mut rep, &devs, SIM_TOL);
    if let Some(&last) = devs.last() {
        rep.fit("dev_times_i", last * (chain[chain.len() - 1] + 1) as f64);
    }
    Ok(rep)
}

fn range(chain: &[usize]) -> (usize, usize) {
    (chain.iter().copied().min().unwrap_or(0), chain.iter().copied().max().unwrap_or(0))
}

/// Threshold at the top of the chain plus the decrease requirement.
fn finish_chain(rep: &mut AsymptoticReport, devs: &[f64], tol: f64) {
    let last = devs.last().copied().unwrap_or(f64::INFINITY);
    rep.gate(last, last < tol, format!("deviation {last:.4e} at the top of the chain is not below {tol}"));
    let dec = decreasing(devs, 1);
    rep.gate(0.0, dec, format!("deviations {devs:?} are not decreasing along the chain"));
    if let Some(r) = rep.rows.last_mut() {
        r.pass = last < tol && dec;
    }
}

/// Slope gate: every per-point slope within [`SLOPE_TOL`] of `exponent`.
fn slope_gate(rep: &mut AsymptoticReport, name: &str, slopes: &[f64], exponent: f64) {
    let worst = slopes.iter().map(|s| (s - exponent).abs()).fold(0.0, f64::max);
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    rep.fit(&format!("{name}_slope_min"), lo);
    rep.fit(&format!("{name}_slope_max"), hi);
    rep.gate(
        0.0,
        worst <= SLOPE_TOL,
        format!("{name} slopes in [{lo:.4}, {hi:.4}] stray more than {SLOPE_TOL} from {exponent}"),
    );
}

/// Which denominator the `x` increment is divided by in the leading-order claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimForm {
    /// `x_{k−1} + g_w⁻¹(y_k)` in both places.
    Literal,
    /// `x_k + g_w⁻¹(y_k)`, the form that expands `ln s_k`.
    Shifted,
}

/// `|(x_{k−1} − x_k)/(x_* + g_w⁻¹(y_k)) + (2a/(a+1))/k|`.
pub fn claim_main_residual(s: &Step, a: f64, form: ClaimForm) -> f64 {
    let k = s.k as f64;
    let den = match form {
        ClaimForm::Literal => s.x_prev + s.ginv,
        ClaimForm::Shifted => s.x + s.ginv,
    };
    ((s.x_prev - s.x) / den + 2.0 * a / ((a + 1.0) * k)).abs()
}

/// `g_w⁻¹(y) − g_0⁻¹(y)` from `G = g_w⁻¹(y)` without cancellation: `g_w(G) = y` gives
/// `G = y^{1/(p−1)} (1 + w²/G²)^{−(p−2)/(2(p−1))}`.
pub fn ginv_drift(y: f64, ginv: f64, w: f64, p: f64) -> f64 {
    let y0 = y.powf(1.0 / (p - 1.0));
    y0 * (-(p - 2.0) / (2.0 * (p - 1.0)) * (w * w / (ginv * ginv)).ln_1p()).exp_m1()
}

/// Leading-order expansion of the `x` increment with remainder `O(k^{−γ})`, the drift
/// `|g_w⁻¹(y_k) − g_0⁻¹(y_k)| = O(k^{−2})` and `g_w⁻¹(y_k)/k² → 1`, along the chain `ks`.
pub fn check_claim_main(model: &ModelParams, ks: &[usize], grid: &[Params]) -> Result<AsymptoticReport, VerifyError> {
    let p = model.p;
    let gam = gamma(p);
    // per point: residuals (two forms), drift and ratio along ks
    type Row = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);
    let per_p: Vec<Row> = grid
        .par_iter()
        .map(|pr| {
            let mut lit = Vec::new();
            let mut sh = Vec::new();
            let mut drift = Vec::new();
            let mut ratio = Vec::new();
            for &k in ks {
                let s = Step::at(k, pr, p)?;
                lit.push(claim_main_residual(&s, pr.a, ClaimForm::Literal));
                sh.push(claim_main_residual(&s, pr.a, ClaimForm::Shifted));
                drift.push(ginv_drift(s.y, s.ginv, pr.w, p).abs());
                ratio.push((s.ginv / (k as f64 * k as f64) - 1.0).abs());
            }
            Ok((lit, sh, drift, ratio))
        })
        .collect::<Result<_, VerifyError>>()?;
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let mut rep = AsymptoticReport::new("claim_main", range(ks), SIM_TOL);

    for (name, sel, expo) in [("claim_literal", 0usize, -gam), ("claim_shifted", 1, -gam), ("ginv_drift", 2, -2.0)] {
        let pick = |r: &Row| -> Vec<f64> {
            match sel {
                0 => r.0.clone(),
                1 => r.1.clone(),
                _ => r.2.clone(),
            }
        };
        let slopes: Vec<f64> = per_p.iter().map(|r| loglog_slope(&kf, &pick(r))).collect();
        slope_gate(&mut rep, name, &slopes, expo);
        // C_k = max over grid of residual·k^{−expo}; stable means the last two agree to 25%
        let cs: Vec<f64> = (0..ks.len())
            .map(|j| per_p.iter().map(|r| pick(r)[j]).fold(0.0, f64::max) * kf[j].powf(-expo))
            .collect();
        for (j, &k) in ks.iter().enumerate() {
            let dev = per_p.iter().map(|r| pick(r)[j]).fold(0.0, f64::max);
            rep.row(name, k, 0, dev, cs[j], true);
        }
        let n = cs.len();
        let c_last = cs[n - 1];
        rep.fit(&format!("{name}_C"), c_last);
        if n >= 2 {
            let spread = (cs[n - 1] / cs[n - 2] - 1.0).abs();
            rep.gate(
                0.0,
                spread <= 0.25,
                format!("{name} constant drifts by {spread:.3} between the last two indices"),
            );
        }
    }
    let ratio_devs: Vec<f64> = (0..ks.len()).map(|j| per_p.iter().map(|r| r.3[j]).fold(0.0, f64::max)).collect();
    for (j, &k) in ks.iter().enumerate() {
        rep.row("ginv_over_k2", k, 0, ratio_devs[j], 1.0, true);
    }
    finish_chain(&mut rep, &ratio_devs, SIM_TOL);
    Ok(rep)
}

/// Names, decay exponents and `(actual, claimed)` values of the five primitive quantities at `r`.
pub fn primitive_pairs(s: &Step, pr: &Params, p: f64) -> [(&'static str, f64, f64, f64); 5] {
    let r = s.k as f64;
    let a = pr.a;
    let ap = a.powf(p - 1.0);
    let xr = s.x + s.ginv;
    let xp = s.x_prev + s.ginv;
    let yr = s.y + s.gx;
    let yp = s.y_prev + s.gx;
    let e_h = 2.0 * (p - 2.0) - 1.0;
    [
        ("x_increment_rate", -1.0, -(2.0 * r - 1.0) / xr, -2.0 / ((a + 1.0) * r)),
        ("x_cross", -3.0, (s.x - s.x_prev) / (xp * xr), 2.0 * a / ((a + 1.0).powi(2) * r.powi(3))),
        (
            "y_cross",
            -3.0,
            s.dy * g_prime(s.x_prev, pr.w, p) / (yr * yp),
            2.0 * (p - 1.0).powi(2) * a.powf(p - 2.0) / ((1.0 + ap).powi(2) * r.powi(3)),
        ),
        ("H1", e_h, s.h1, 2.0 * (p - 1.0) / (1.0 + ap) * a.powf(p - 2.0) * r.powf(e_h) * pr.w),
        ("H2", e_h, s.h2, 2.0 * a / (a + 1.0) * r.powf(e_h) * pr.w),
    ]
}

/// The five primitive asymptotics along the chain `rs`: ratio deviation below [`SIM_TOL`] at
/// the top and decreasing, and per-point log-log slopes within [`SLOPE_TOL`] of the exponent.
pub fn check_primitive_asymptotics(model: &ModelParams, grid: &[Params], rs: &[usize]) -> Result<AsymptoticReport, VerifyError> {
    let p = model.p;
    let per_p: Vec<Vec<[(&'static str, f64, f64, f64); 5]>> = grid
        .par_iter()
        .map(|pr| {
            rs.iter()
                .map(|&r| Ok(primitive_pairs(&Step::at(r, pr, p)?, pr, p)))
                .collect::<Result<Vec<_>, VerifyError>>()
        })
        .collect::<Result<_, VerifyError>>()?;
    let rf: Vec<f64> = rs.iter().map(|&r| r as f64).collect();
    let mut rep = AsymptoticReport::new("primitive", range(rs), SIM_TOL);
    for q in 0..5 {
        let name = per_p[0][0][q].0;
        let expo = per_p[0][0][q].1;
        let mut sub = AsymptoticReport::new(name, range(rs), SIM_TOL);
        let devs: Vec<f64> = (0..rs.len())
            .map(|j| per_p.iter().map(|v| (v[j][q].2 / v[j][q].3 - 1.0).abs()).fold(0.0, f64::max))
            .collect();
        for (j, &r) in rs.iter().enumerate() {
            sub.row(name, r, r, devs[j], expo, true);
        }
        finish_chain(&mut sub, &devs, SIM_TOL);
        let slopes: Vec<f64> = per_p.iter().map(|v| loglog_slope(&rf, &v.iter().map(|x| x[q].2).collect::<Vec<_>>())).collect();
        slope_gate(&mut sub, "loglog", &slopes, expo);
        rep.merge(sub);
    }
    Ok(rep)
}
