use stairlam_construct::*;
use stairlam_core::{Mat2, SetTag};
use stairlam_laminate::Laminate;

/// Exact weights of the three-atom demo laminate. `S = (S + d)/3 + 2(S − d/2)/3`, then
/// `E = (E + f)/2 + (E − f)/2`, so each atom carries `1/3`.
fn demo_weights() -> [(SetTag, f64); 3] {
    [
        (SetTag::u1(DEMO_I, DEMO_I), 1.0 / 3.0),
        (SetTag::u2(DEMO_I, DEMO_I), 1.0 / 3.0),
        (SetTag::u3(DEMO_I + 1), 1.0 / 3.0),
    ]
}

#[test]
fn demo_laminate_fractions() {
    let lam = DemoSource { carry: false }.initial().unwrap();
    for (t, w) in demo_weights() {
        assert!((lam.mass_tagged(t) - w).abs() < 1e-14, "{t:?}");
    }
    let cell = Polygon::rect(0.0, 0.0, 0.5, 0.5);
    let eps = 0.1;
    let map = finite_order_map(&cell, &lam, (lam.root, [0.0, 0.0]), eps).unwrap();
    assert!(map.area_defect() < 1e-9, "defect {:e} cells {}", map.area_defect(), map.len());
    assert!(map.boundary_deviation() < 1e-12 * map.value_scale());
    assert!(map.continuity_gap() < 1e-11 * map.value_scale());
    assert!(atom_fraction_error(&map, &lam) <= eps);
    for (t, w) in demo_weights() {
        let f = map.area_where(|c| c.set() == Some(t)) / cell.area();
        assert!(f <= w + 1e-12 && f >= w - eps, "{t:?}: {f} vs {w}");
    }
    assert!(map.gradient_drift() < 1e-12);
    let base = PAMap::affine(cell, lam.root, [0.0, 0.0], CellTag::Untagged);
    assert!(map.sup_distance(&base, &vec![0; map.len()]) <= eps + 1e-12);
}

#[test]
fn dirac_is_identity() {
    let m = Mat2::new(1.0, 1.0, 0.0, 1.0);
    let lam = Laminate::dirac(m);
    let cell = Polygon::regular([0.0, 0.0], 1.0, 6);
    let map = finite_order_map(&cell, &lam, (m, [1.0, 2.0]), 0.1).unwrap();
    assert_eq!(map.len(), 1);
    assert!((map.cells[0].poly.area() - cell.area()).abs() < 1e-15);
}

#[test]
fn barycenter_must_match_base() {
    let lam = DemoSource { carry: false }.initial().unwrap();
    let wrong = lam.root + Mat2::new(0.0, 0.0, 0.0, 0.1);
    let err = finite_order_map(&Polygon::unit_square(), &lam, (wrong, [0.0, 0.0]), 0.1);
    assert!(matches!(err, Err(ConstructError::BadBarycenter { .. })));
}

#[test]
fn carried_splitting_keeps_kind_mass() {
    // a U¹ piece splits 3/4 onto the same kind and 1/4 onto the other
    let src = DemoSource { carry: true };
    let s = demo_root();
    let lam = src.replacement(SetTag::u1(DEMO_I, DEMO_I), s, 1).unwrap().unwrap();
    assert!((lam.mass_tagged(SetTag::u1(DEMO_I, DEMO_I + 1)) - 0.75).abs() < 1e-14);
    let cell = Polygon::unit_square();
    let map = finite_order_map(&cell, &lam, (s, [0.0, 0.0]), 0.02).unwrap();
    let f = map.area_where(|c| c.set() == Some(SetTag::u1(DEMO_I, DEMO_I + 1)));
    assert!(f <= 0.75 + 1e-12 && f >= 0.75 - 0.02);
}
