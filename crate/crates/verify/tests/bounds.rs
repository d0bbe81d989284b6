mod common;

use common::*;
use stairlam_core::{g_rate, Params, SetTag};
use stairlam_staircase::{endpoints, t_q, Stair};
use stairlam_verify::*;

#[test]
fn weight_bounds_hold_at_p3() {
    let m = model3();
    let i0 = m.i_start;
    let rep = check_weight_and_mass_bounds(
        &m,
        (i0, i0 + 40),
        &[i0, i0 + 10, i0 + 50],
        &small_grid(m.c),
        &[Params::center(m.c)],
        &[20, 30, 40],
    )
    .unwrap();
    assert!(rep.pass, "{}", rep.summary());
    assert!(rep.fitted("lambda1_k1").unwrap() > 0.0);
}

#[test]
fn dichotomy_holds() {
    for m in [model3(), model15()] {
        let d = check_measure_dichotomy(&m, &Params::center(m.c), &DICHOTOMY_NS).unwrap();
        assert!(d.pass, "p={}: {d:?}", m.p);
        assert!(d.low_variation <= 0.1);
        assert!(d.high_growth >= 0.5);
    }
}

#[test]
fn dichotomy_needs_two_lengths() {
    let m = model3();
    assert!(check_measure_dichotomy(&m, &Params::center(m.c), &[20]).is_err());
}

#[test]
fn a_atom_mass_is_product_of_third_weights() {
    // along the staircase the A-atom only survives the third branch of every base split
    let m = model3();
    let pr = Params::at_fractions(m.c, [0.4, 0.6, 0.5, 0.3]);
    let (i0, n) = (m.i_start, 6);
    let stair = Stair::new(pr, m, i0 + n + 1).unwrap();
    let lam = stair.staircase_laminate(i0, i0 + n, i0 + n).unwrap();
    let mass = lam.mass_tagged(SetTag::u3(i0 + n));
    let mut prod = 1.0;
    for i in i0..(i0 + n) {
        let f = endpoints(i, &pr, &m).unwrap();
        prod *= f.base_weights(t_q(i0 + n, m.t0)).2;
    }
    assert!((mass / prod - 1.0).abs() < 1e-9, "{mass} vs {prod}");
    // and the decay rate is governed by G_p(a) at this point
    assert!(g_rate(pr.a, m.p) >= m.g_bounds().0);
}
