use stairlam_construct::*;
use stairlam_core::Mat2;

fn e11() -> Mat2 {
    Mat2::outer([1.0, 0.0], [1.0, 0.0])
}

fn saw() -> PAMap {
    simple_laminate_map(&Polygon::unit_square(), Mat2::new(0.0, 0.0, 0.0, 0.0), [0.0, 0.0], e11(), -e11(), 0.5, 1.0).unwrap()
}

#[test]
fn affine_map_is_fixed() {
    let w = PAMap::affine(Polygon::unit_square(), Mat2::new(1.0, 2.0, 3.0, 4.0), [0.5, -1.0], CellTag::Untagged);
    assert!(mollify_distance(&w, 0.125).unwrap() < 1e-12);
    assert_eq!(mollify_bound(&w, 0.125), 0.0);
}

#[test]
fn distance_shrinks_with_radius_and_obeys_bound() {
    let w = saw();
    let d: Vec<f64> = [0.05, 0.025, 0.0125].iter().map(|&r| mollify_distance(&w, r).unwrap()).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    for (r, v) in [0.05, 0.025, 0.0125].iter().zip(&d) {
        assert!(*v <= mollify_bound(&w, *r), "{v} at {r}");
    }
}

#[test]
fn kernel_moment_matches_quadrature() {
    // ∫|z|(1−|z|²)³ dz / ∫(1−|z|²)³ dz in the plane, by the radial midpoint rule
    let k = 200_000;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        let r = (i as f64 + 0.5) / k as f64;
        let w = (1.0 - r * r).powi(3) * r;
        num += w * r;
        den += w;
    }
    assert!((num / den - KERNEL_MOMENT).abs() < 1e-9);
}

#[test]
fn choose_delta_meets_target() {
    let w = saw();
    let (delta, dist, how) = choose_delta(&w, 0.3, 0.2).unwrap();
    assert_eq!(how, MollifyMethod::Raster);
    assert!(delta < 0.3 && dist <= 0.2);
    assert_eq!(delta.log2().fract(), 0.0);
    assert!(mollify_distance(&w, 2.0 * delta).map_or(true, |d| d > 0.2 || 2.0 * delta >= 0.3));
}
