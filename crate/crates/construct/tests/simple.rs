use stairlam_construct::*;
use stairlam_core::Mat2;

fn e11() -> Mat2 {
    Mat2::outer([1.0, 0.0], [1.0, 0.0])
}

fn zero() -> Mat2 {
    Mat2::new(0.0, 0.0, 0.0, 0.0)
}

fn side_area(map: &PAMap, m: Mat2) -> f64 {
    map.cells
        .iter()
        .filter(|c| !c.tag.is_layer() && c.a.max_abs_diff(m) < 1e-12)
        .map(|c| c.poly.area())
        .sum()
}

#[test]
fn half_split_on_square() {
    let sq = Polygon::unit_square();
    let eps = 0.1;
    let map = simple_laminate_map(&sq, zero(), [0.0, 0.0], e11(), -e11(), 0.5, eps).unwrap();
    let (fb, fc) = (side_area(&map, e11()), side_area(&map, -e11()));
    let layer = map.boundary_layer_area();
    assert!(map.area_defect() < 1e-12);
    assert!((fb + fc + layer - 1.0).abs() < 1e-12);
    assert!(layer <= 0.5 * eps + 1e-12, "layer {layer}");
    assert!(fb <= 0.5 + 1e-12 && fb >= 0.5 - eps, "B fraction {fb}");
    assert!(fc <= 0.5 + 1e-12 && fc >= 0.5 - eps, "C fraction {fc}");
    assert!(map.boundary_deviation() < 1e-12);
    assert!(map.continuity_gap() < 1e-12);
    assert!(map.lipschitz() <= 1.0 + 1e-12);
    let parents = vec![0; map.len()];
    let base = PAMap::affine(sq, zero(), [0.0, 0.0], CellTag::Untagged);
    assert!(map.sup_distance(&base, &parents) <= eps + 1e-12);
}

#[test]
fn oblique_normal_on_polygon() {
    // B − C = a ⊗ n with n not aligned with any edge
    let cell = Polygon::regular([0.3, -0.2], 0.7, 7);
    let n = [0.6, 0.8];
    let (bm, cm) = (
        Mat2::new(1.0, 2.0, 0.0, 1.0) + Mat2::outer([0.5, -1.0], n) * 0.25,
        Mat2::new(1.0, 2.0, 0.0, 1.0) - Mat2::outer([0.5, -1.0], n) * 0.75,
    );
    let a = bm * 0.75 + cm * 0.25;
    let eps = 0.05;
    let map = simple_laminate_map(&cell, a, [0.1, 0.2], bm, cm, 0.75, eps).unwrap();
    assert!(map.area_defect() < 1e-12);
    assert!(map.boundary_deviation() < 1e-12 * map.value_scale());
    assert!(map.continuity_gap() < 1e-11 * map.value_scale());
    assert!(map.boundary_layer_area() <= 0.5 * eps * cell.area() + 1e-12);
    let fb = side_area(&map, bm) / cell.area();
    assert!(fb <= 0.75 + 1e-12 && fb >= 0.75 - eps, "B fraction {fb}");
    let base = PAMap::affine(cell, a, [0.1, 0.2], CellTag::Untagged);
    assert!(map.sup_distance(&base, &vec![0; map.len()]) <= eps + 1e-12);
}

#[test]
fn degenerate_fractions_give_one_cell() {
    let sq = Polygon::unit_square();
    let one = simple_laminate_map(&sq, e11(), [0.0, 0.0], e11(), -e11(), 1.0, 0.1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one.cells[0].target, Some(e11()));
    let zero_frac = simple_laminate_map(&sq, -e11(), [0.0, 0.0], e11(), -e11(), 0.0, 0.1).unwrap();
    assert_eq!(zero_frac.len(), 1);
    assert_eq!(zero_frac.cells[0].target, Some(-e11()));
}

#[test]
fn rejects_bad_inputs() {
    let sq = Polygon::unit_square();
    let err = simple_laminate_map(
        &sq,
        zero(),
        [0.0, 0.0],
        Mat2::new(1.0, 0.0, 0.0, 1.0),
        Mat2::new(-1.0, 0.0, 0.0, -1.0),
        0.5,
        0.1,
    );
    assert!(matches!(err, Err(ConstructError::NotRankOne { .. })));
    let err = simple_laminate_map(&sq, zero(), [0.0, 0.0], e11(), -e11(), 0.3, 0.1);
    assert!(matches!(err, Err(ConstructError::BadBarycenter { .. })));
    let err = simple_laminate_map(&sq, zero(), [0.0, 0.0], e11(), -e11(), 0.5, 0.0);
    assert!(matches!(err, Err(ConstructError::Precondition(_))));
}

#[test]
fn finer_epsilon_costs_more_cells() {
    let sq = Polygon::unit_square();
    let coarse = projected_cells(&sq, e11(), -e11(), 0.5, 0.1, 0.0).unwrap();
    let fine = projected_cells(&sq, e11(), -e11(), 0.5, 0.01, 0.0).unwrap();
    assert!(fine > coarse);
    let huge = Mat2::outer([1e9, 0.0], [1.0, 0.0]);
    let err = simple_laminate_map(&sq, zero(), [0.0, 0.0], huge, -huge, 0.5, 1e-3);
    assert!(matches!(err, Err(ConstructError::BudgetExceeded { .. })));
}

#[test]
fn rank_one_factors_reconstruct() {
    let m = Mat2::outer([2.0, -3.0], [0.28, 0.96]);
    let (a, n) = rank_one_factors(m).unwrap();
    assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-15);
    assert!(Mat2::outer(a, n).max_abs_diff(m) < 1e-14);
}
