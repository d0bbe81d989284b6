mod common;
use common::*;
use stairlam_core::*;
use stairlam_staircase::*;

#[test]
fn t0_design_values() {
    let t3 = design_t0(0.125, 3.0);
    let star = 1.0 / (1.0 + 0.125f64.powi(2));
    assert!((t3 - (star + (1.0 - star) / 2.0)).abs() < 1e-15 && t3 < 1.0);
    let t15 = design_t0(8.0, 1.5);
    assert!((t15 - (16.0 / 17.0 + 0.02)).abs() < 1e-15);
}

#[test]
fn sign_conditions_hold_from_i_start() {
    for m in [model3(), model15()] {
        let grid = Params::lattice(m.c, &[0.0, 0.5, 1.0]);
        let sm = t0_margins(&m, m.i_start, m.i_start + 30, &grid).unwrap();
        assert!(sm.min_sign() > 0.0, "p={} {:?}", m.p, sm);
        assert!(sm.index_gap >= DIST_MIN, "p={} {:?}", m.p, sm);
    }
}

#[test]
fn sign_margin_regions() {
    let m = Mat2::new(3.0, 1.0, 0.0, -2.0);
    assert_eq!(sign_margin(m, SetKind::U1), 2.0);
    assert!(sign_margin(m, SetKind::U2) < 0.0);
    assert!(sign_margin(m, SetKind::U3) < 0.0);
}

#[test]
fn membership_roundtrip_and_exclusion() {
    for m in [model3(), model15()] {
        // inversion divides by 1 - t_q, so it is only well conditioned for small q
        let i = m.i_start + 3;
        let q = 2;
        let p = Params::at_fractions(m.c, [0.35, 0.6, 0.45, 0.55]);
        let st = Stair::new(p, m, i + 2).unwrap();
        let f = st.frame(i).unwrap();
        let t = st.t(q);
        let m1 = f.phi(1, t).unwrap();
        let m2 = f.phi(2, t).unwrap();
        let a = f.a();
        let back = invert(m1, SetTag::u1(i, q), &m).unwrap().expect("U1 member");
        assert!((back.a - p.a).abs() < 1e-8 * p.a && (back.x0 - p.x0).abs() < 1e-6);
        assert!(membership(m2, SetTag::u2(i, q), &m));
        assert!(membership(a, SetTag::u3(i), &m));
        assert!(!membership(m1, SetTag::u2(i, q), &m));
        assert!(!membership(m2, SetTag::u1(i, q), &m));
        assert!(!membership(a, SetTag::u3(i + 1), &m));
        assert!(!membership(a, SetTag::u3(i - 1), &m));
        assert!(!membership(m1 + Mat2::new(0.0, 0.0, 1e-3 * m1.m21.abs().max(1.0), 0.0), SetTag::u1(i, q), &m));
    }
}
