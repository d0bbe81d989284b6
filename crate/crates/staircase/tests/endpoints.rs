mod common;
use common::*;
use proptest::prelude::*;
use stairlam_core::*;
use stairlam_staircase::*;

fn rel(a: Mat2, b: Mat2) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn check_frame(f: &StairFrame, next: Option<&StairFrame>, p: f64) {
    let scale = f.b().norm().max(f.d().norm()).max(1.0);
    assert!(dist_to_kp(f.b(), p) <= 1e-9 * scale);
    assert!(dist_to_kp(f.d(), p) <= 1e-9 * scale);
    assert!(rank_one_gap(f.b() - f.e()) <= 1e-9);
    assert!(rank_one_gap(f.c() - f.d()) <= 1e-9);
    let l = f.lambdas();
    assert!((l.lb + l.le - 1.0).abs() <= 1e-12);
    assert!((l.lc + l.ld - 1.0).abs() <= 1e-12);
    for v in [l.lb, l.le, l.lc, l.ld] {
        assert!(v > 0.0 && v < 1.0);
    }
    assert!(rel(f.a(), f.b() * l.lb + f.e() * l.le) <= 1e-10);
    assert!(rel(f.e(), f.c() * l.lc + f.d() * l.ld) <= 1e-10);
    if let Some(n) = next {
        assert!(rel(f.c(), n.a()) <= 1e-12);
    }
}

#[test]
fn endpoint_identities() {
    for m in [model3(), model15()] {
        for p in corners(m.c) {
            let st = Stair::new(p, m, m.i_start + 60).unwrap();
            for i in m.i_start..m.i_start + 60 {
                let f = st.frame(i).unwrap();
                let n = st.frame(i + 1).unwrap();
                check_frame(&f, Some(&n), m.p);
            }
        }
    }
}

#[test]
fn standalone_endpoints_agree_with_stair() {
    let m = model3();
    let p = Params::center(m.c);
    let st = Stair::new(p, m, 50).unwrap();
    let f = endpoints(40, &p, &m).unwrap();
    assert!(rel(f.a(), st.frame(40).unwrap().a()) < 1e-9);
    let l = lambdas(40, &p, &m).unwrap();
    assert_eq!(l, f.lambdas());
}

#[test]
fn interpolation_endpoints_and_affinity() {
    let m = model15();
    let p = Params::at_fractions(m.c, [0.2, 0.4, 0.6, 0.8]);
    let st = Stair::new(p, m, 30).unwrap();
    let f = st.frame(20).unwrap();
    assert!(rel(f.phi(1, 0.0).unwrap(), f.a()) < 1e-15);
    assert!(rel(f.phi(2, 0.0).unwrap(), f.e()) < 1e-15);
    assert!(rel(f.phi(1, 1.0).unwrap(), f.b()) < 1e-12);
    assert!(rel(f.phi(2, 1.0).unwrap(), f.d()) < 1e-12);
    for k in [1u8, 2] {
        let mid = (f.phi(k, 0.2).unwrap() + f.phi(k, 0.8).unwrap()) * 0.5;
        assert!(rel(f.phi(k, 0.5).unwrap(), mid) < 1e-13);
    }
    assert!(f.phi(3, 0.5).is_err());
    assert!(rel(phi(1, 20, 0.3, &p, &m).unwrap(), f.phi(1, 0.3).unwrap()) < 1e-9);
}

#[test]
fn endpoint_table_csv() {
    let m = model3();
    let st = Stair::new(Params::center(m.c), m, 10).unwrap();
    let mut buf = Vec::new();
    write_endpoint_table(&mut buf, &st, 1, 10).unwrap();
    let s = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines[0], "i,x_i,y_i,z_i,v_i,lambda_b,lambda_e,lambda_c,lambda_d");
    assert_eq!(lines.len(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn endpoints_on_random_points(fr in prop::array::uniform4(0.0..1.0f64), di in 0usize..50, pick in 0usize..2) {
        let m = if pick == 0 { model3() } else { model15() };
        let p = Params::at_fractions(m.c, fr);
        let i = m.i_start + di;
        let st = Stair::new(p, m, i + 1).unwrap();
        check_frame(&st.frame(i).unwrap(), Some(&st.frame(i + 1).unwrap()), m.p);
    }
}
