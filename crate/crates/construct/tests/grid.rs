use stairlam_construct::*;
use stairlam_core::Mat2;

#[test]
fn sides_halve_and_bound_diameter() {
    for n in 1..=10 {
        let s = grid_side(n);
        assert_eq!(s, 2f64.powi(-(n as i32)));
        assert!(s * std::f64::consts::SQRT_2 <= 1.0 / n as f64 + 1e-15);
    }
}

#[test]
fn cells_tile_domain_and_nest() {
    for dom in [Polygon::unit_square(), Polygon::regular([0.5, 0.5], 0.5, 64)] {
        let g3 = grid_family(&dom, 3);
        let g4 = grid_family(&dom, 4);
        for g in [&g3, &g4] {
            let total: f64 = g.cells.iter().map(|c| c.2.area()).sum();
            assert!((total - dom.area()).abs() < 1e-12);
            for c in &g.cells {
                assert!(c.2.diameter() <= 1.0 / g.n as f64 + 1e-12);
            }
        }
        for c in &g4.cells {
            let parent = g3.locate(c.2.centroid()).unwrap();
            assert!(c.2.intersect(&g3.cells[parent].2).area() > c.2.area() * (1.0 - 1e-12));
        }
    }
}

#[test]
fn subdivide_keeps_values() {
    let dom = Polygon::unit_square();
    let map = simple_laminate_map(
        &dom,
        Mat2::new(0.0, 0.0, 0.0, 0.0),
        [0.0, 0.0],
        Mat2::outer([1.0, 0.0], [0.6, 0.8]),
        Mat2::outer([-1.0, 0.0], [0.6, 0.8]),
        0.5,
        0.1,
    )
    .unwrap();
    let g = grid_family(&dom, 3);
    let (fine, parents, owners) = g.subdivide(&map);
    assert!(fine.area_defect() < 1e-12);
    assert!(fine.sup_distance(&map, &parents) < 1e-14);
    assert!(fine.continuity_gap() < 1e-12);
    // rounding slivers along grid lines have unreliable centroids
    for (c, &o) in fine.cells.iter().zip(&owners).filter(|(c, _)| c.poly.area() > 1e-12) {
        assert_eq!(g.locate(c.poly.centroid()), Some(o), "{:?} area {}", c.poly, c.poly.area());
    }
}
