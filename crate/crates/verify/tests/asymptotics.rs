mod common;

use common::*;
use stairlam_core::{g_rate, Params};
use stairlam_staircase::{Ladder, Step};
use stairlam_verify::*;

/// `S_i/S_ℓ` as a product of factors built straight from the sequences.
fn oracle_ratio(i: usize, l: usize, pr: &Params, p: f64) -> f64 {
    let x = |k: usize| pr.a * (k * k) as f64 + pr.x0;
    let y = |k: usize| (k as f64).powf(2.0 * (p - 1.0)) + pr.y0;
    let gw = |u: f64| (u * u + pr.w * pr.w).powf((p - 2.0) / 2.0) * u;
    let mut prod = 1.0;
    for k in (i + 1)..=l {
        let gi = oracle_ginv(y(k), pr.w, p);
        let gx = gw(x(k - 1));
        prod *= (x(k - 1) + gi) / (x(k) + gi) * (y(k - 1) + gx) / (y(k) + gx);
    }
    prod
}

#[test]
fn ratio_law_deviation_matches_oracle_products() {
    let m = model3();
    let pr = Params::at_fractions(m.c, [0.3, 0.7, 0.1, 0.9]);
    let mut lad = Ladder::new(pr, m.p);
    lad.extend_to(64 * 4).unwrap();
    let (dev, l) = s_ratio_deviation(&lad, 64, 4);
    let two_g = 2.0 * g_rate(pr.a, m.p);
    let direct = (oracle_ratio(64, l, &pr, m.p) * (l as f64 / 65.0).powf(two_g) - 1.0).abs();
    assert!((dev - direct).abs() <= 1e-9, "{dev} vs {direct}");
}

#[test]
fn ratio_law_improves_with_i() {
    for m in [model3(), model15()] {
        let rep = check_s_asymptotic(&m, &doubling_chain(m.i_start, 3), 8, &small_grid(m.c)).unwrap();
        assert!(rep.pass, "p={}: {}", m.p, rep.summary());
        let d: Vec<f64> = rep.rows.iter().map(|r| r.deviation).collect();
        assert!(d[2] < d[0]);
    }
}

#[test]
fn ratio_law_holds_at_p2_as_a_control() {
    let m = model2();
    let rep = check_s_asymptotic(&m, &[64, 128, 256], 8, &small_grid(m.c)).unwrap();
    assert!(rep.pass, "{}", rep.summary());
}

#[test]
fn leading_order_claim_holds_along_chain() {
    for m in [model3(), model15()] {
        let rep = check_claim_main(&m, &doubling_chain(m.i_start, 5), &small_grid(m.c)).unwrap();
        assert!(rep.pass, "p={}: {}", m.p, rep.summary());
        let s = rep.fitted("ginv_drift_slope_min").unwrap();
        assert!((s + 2.0).abs() < 0.1, "{s}");
    }
}

#[test]
fn drift_identity_matches_direct_difference() {
    for (p, w, y) in [(3.0, 1.1, 40.0), (1.5, 9.0, 3.0), (2.5, 0.8, 200.0)] {
        let g = oracle_ginv(y, w, p);
        let direct = g - y.powf(1.0 / (p - 1.0));
        let d = ginv_drift(y, g, w, p);
        assert!((d - direct).abs() <= 1e-9 * direct.abs().max(1.0), "p={p}: {d} vs {direct}");
    }
}

#[test]
fn primitive_quantities_match_oracle_and_claims() {
    let m = model3();
    let pr = Params::at_fractions(m.c, [0.5, 0.2, 0.8, 0.4]);
    let r = 10 * m.i_start;
    let s = Step::at(r, &pr, m.p).unwrap();
    let gi = oracle_ginv(s.y, pr.w, m.p);
    assert!((s.ginv - gi).abs() <= 1e-10 * gi);
    for (name, _, actual, claimed) in primitive_pairs(&s, &pr, m.p) {
        assert!((actual / claimed - 1.0).abs() < SIM_TOL, "{name}: {actual} vs {claimed}");
    }
    let rep = check_primitive_asymptotics(&m, &small_grid(m.c), &doubling_chain(m.i_start, 5)).unwrap();
    assert!(rep.pass, "{}", rep.summary());
}

#[test]
fn literal_and_shifted_residuals_are_close_at_large_k() {
    let m = model15();
    let pr = Params::center(m.c);
    let s = Step::at(4096, &pr, m.p).unwrap();
    let lit = claim_main_residual(&s, pr.a, ClaimForm::Literal);
    let sh = claim_main_residual(&s, pr.a, ClaimForm::Shifted);
    assert!(lit < 1e-5 && sh < 1e-5, "{lit} {sh}");
}
