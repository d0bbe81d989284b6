mod common;

use common::*;
use proptest::prelude::*;
use stairlam_core::Params;
use stairlam_staircase::{z_series, Step};
use stairlam_verify::*;

#[test]
fn series_matches_central_difference_of_truncated_z() {
    for (m, fr) in [(model3(), [0.1, 0.9, 0.3, 0.7]), (model15(), [0.9, 0.1, 0.7, 0.3])] {
        let pr = Params::at_fractions(m.c, fr);
        for i in [m.i_start, m.i_start + 25] {
            let n = default_terms(i);
            let mut lad = DeltaLadder::new(pr, m.p);
            lad.extend_to(n).unwrap();
            let v = lad.fixed(i, n);
            let fd = delta_z_fd(lad.ladder(), i, n, FD_STEP * m.c);
            assert!((fd - v.dz).abs() <= FD_TOL * v.dz.abs(), "p={} i={i}: {fd} vs {}", m.p, v.dz);
        }
    }
}

#[test]
fn series_matches_difference_of_brute_force_z_at_p_15() {
    // for p = 1.5 the terms decay like ℓ^{-4}, so a plain cutoff sum is an accurate oracle
    let m = model15();
    let pr = Params::at_fractions(m.c, [0.5, 0.5, 0.5, 0.5]);
    let i = 20;
    let h = 1e-4 * m.c;
    let ii = (i * i) as f64;
    let plus = Params {
        a: pr.a + h,
        x0: pr.x0 - ii * h,
        ..pr
    };
    let minus = Params {
        a: pr.a - h,
        x0: pr.x0 + ii * h,
        ..pr
    };
    let fd = (oracle_z(i, &plus, m.p, 60_000) - oracle_z(i, &minus, m.p, 60_000)) / (2.0 * h);
    let dz = delta_z_series(i, &pr, m.p, 1e-9).unwrap();
    assert!((fd - dz).abs() <= 1e-5 * dz.abs(), "{fd} vs {dz}");
}

#[test]
fn adaptive_series_agrees_with_long_truncation() {
    let m = model3();
    let pr = Params::center(m.c);
    let i = m.i_start;
    let adaptive = delta_z_series(i, &pr, m.p, 1e-8).unwrap();
    let n = 4096 * (i + 1);
    let mut lad = DeltaLadder::new(pr, m.p);
    lad.extend_to(n).unwrap();
    let long = lad.fixed(i, n).dz;
    assert!((adaptive - long).abs() <= 1e-7 * long.abs());
}

#[test]
fn fixed_z_matches_ladder_and_library_z() {
    let m = model3();
    let pr = Params::at_fractions(m.c, [0.2, 0.4, 0.6, 0.8]);
    let i = 40;
    let n = default_terms(i);
    let mut lad = DeltaLadder::new(pr, m.p);
    lad.extend_to(n).unwrap();
    let v = lad.fixed(i, n);
    let (sum, _, tail, _) = lad.ladder().fixed_series(i, n, lad.ladder().alpha(), Step::h);
    assert!((v.z - (sum + tail)).abs() <= 1e-12 * v.z.abs());
    let z = z_series(i, &pr, &m).unwrap();
    assert!((v.z - z).abs() <= 1e-8 * z.abs(), "{} vs {z}", v.z);
}

#[test]
fn positive_and_scaled_on_small_grid() {
    for m in [model3(), model15()] {
        let s = scan_delta(m.p, m.c, &small_grid(m.c), m.i_start, m.i_start + 4, true, false).unwrap();
        assert!(s.all_positive, "{s:?}");
        assert!(s.min_scaled > 0.0);
        assert!(s.fd_max_rel <= FD_TOL);
        assert_eq!(s.evaluations, 81 * 5);
    }
}

#[test]
fn p2_z_is_w_and_derivative_vanishes() {
    let m = model2();
    let pr = Params::new(1.0, 1.1, 0.9, 1.2);
    let z = z_series(10, &pr, &m).unwrap();
    assert!((z - pr.w).abs() <= 1e-8, "z = {z}");
    let dz = delta_z_series(10, &pr, m.p, 1e-6).unwrap();
    assert!(dz.abs() <= POSITIVITY_FLOOR * z / 10.0, "dz = {dz}");
}

#[test]
fn rate_slope_matches_difference() {
    for (p, a) in [(3.0, 0.2), (1.5, 11.0), (2.5, 0.7)] {
        let h = 1e-6 * a;
        let fd = (stairlam_core::g_rate(a + h, p) - stairlam_core::g_rate(a - h, p)) / (2.0 * h);
        assert!((fd - g_rate_slope(a, p)).abs() <= 1e-7 * fd.abs().max(1e-3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // τ_r is minus the derivative of ln s_r along (1, −i², 0, 0)
    #[test]
    fn tau_is_derivative_of_log_factor(fa in 0.0..1.0f64, fx in 0.0..1.0f64, fy in 0.0..1.0f64, fw in 0.0..1.0f64,
                                       r in 2usize..200, di in 0usize..30, hi in any::<bool>()) {
        let (p, c) = if hi { (3.0, 0.125) } else { (1.5, 8.0) };
        let pr = Params::at_fractions(c, [fa, fx, fy, fw]);
        let i = r.saturating_sub(di).max(1);
        let ii = (i * i) as f64;
        let h = 1e-6 * c;
        let at = |s: f64| Step::at(r, &Params { a: pr.a + s * h, x0: pr.x0 - s * ii * h, ..pr }, p).unwrap();
        let fd = -(at(1.0).log_s - at(-1.0).log_s) / (2.0 * h);
        let co = DeltaCoeffs::at(&Step::at(r, &pr, p).unwrap(), &pr, p);
        let dxm = ((r - 1) * (r - 1)) as f64 - ii;
        let tau = co.tau_a + co.tau_b * dxm;
        prop_assert!((fd - tau).abs() <= 1e-6 * tau.abs().max(1e-3), "{} vs {}", fd, tau);
        // ρ¹ and ρ² are the logarithmic derivatives of H¹ and H²
        let fd1 = ((at(1.0).h1).ln() - (at(-1.0).h1).ln()) / (2.0 * h);
        let fd2 = ((at(1.0).h2).ln() - (at(-1.0).h2).ln()) / (2.0 * h);
        let r1 = co.rho1_a + co.rho1_b * dxm;
        let r2 = co.rho2_a + co.rho2_b * dxm;
        prop_assert!((fd1 - r1).abs() <= 1e-6 * r1.abs().max(1e-3));
        prop_assert!((fd2 - r2).abs() <= 1e-6 * r2.abs().max(1e-3));
    }
}
