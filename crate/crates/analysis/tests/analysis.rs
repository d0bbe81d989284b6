use proptest::prelude::*;
use stairlam_analysis::*;
use stairlam_construct::{grid_family, simple_laminate_map, AffineCell, CellTag, PAMap, Polygon};
use stairlam_core::{kp_point, Mat2, SetTag};

fn square() -> Polygon {
    Polygon::unit_square()
}

fn center_bump() -> TestFunction {
    TestFunction::new([0.5, 0.5], 0.4, &square()).unwrap()
}

/// `u` equal to `g·x` below the line through `(0.5, 0.5)` orthogonal to `n` and to
/// `(g − αn)·x + const` above it, continuous across the line; the second row is zero.
fn two_cell_map(g: [f64; 2], n: [f64; 2], alpha: f64) -> PAMap {
    let x0 = [0.5, 0.5];
    let c = n[0] * x0[0] + n[1] * x0[1];
    let lo_grad = Mat2::new(g[0], g[1], 0.0, 0.0);
    let hi_grad = Mat2::new(g[0] - alpha * n[0], g[1] - alpha * n[1], 0.0, 0.0);
    let lo = AffineCell {
        poly: square().clip(n, c),
        a: lo_grad,
        b: [0.0, 0.0],
        tag: CellTag::Untagged,
        target: None,
    };
    let hi = AffineCell {
        poly: square().clip([-n[0], -n[1]], -c),
        a: hi_grad,
        b: [alpha * c, 0.0],
        tag: CellTag::Untagged,
        target: None,
    };
    PAMap {
        cells: vec![lo, hi],
        domain: square(),
        boundary_affine: (lo_grad, [0.0, 0.0]),
    }
}

fn flux(g: [f64; 2], p: f64) -> [f64; 2] {
    let f = g[0].hypot(g[1]).powf(p - 2.0);
    [f * g[0], f * g[1]]
}

#[test]
fn quadrature_is_exact_on_polynomials() {
    for n in [1, 2, 5, 8, 16] {
        let rule = gauss_legendre(n);
        assert!((rule.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-14);
        for deg in 0..2 * n {
            let v: f64 = rule.iter().map(|(t, w)| w * t.powi(deg as i32)).sum();
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n {n} degree {deg}");
        }
    }
}

#[test]
fn bump_gradient_and_norm() {
    let phi = center_bump();
    let h = 1e-6;
    for x in [[0.6, 0.55], [0.3, 0.7], [0.51, 0.2]] {
        let g = phi.gradient(x);
        let fx = (phi.value([x[0] + h, x[1]]) - phi.value([x[0] - h, x[1]])) / (2.0 * h);
        let fy = (phi.value([x[0], x[1] + h]) - phi.value([x[0], x[1] - h])) / (2.0 * h);
        assert!((g[0] - fx).abs() < 1e-7 && (g[1] - fy).abs() < 1e-7);
    }
    // radial midpoint rule for ∫|∇φ|
    let k = 100_000;
    let r = phi.radius;
    let num: f64 = (0..k)
        .map(|i| {
            let rho = (i as f64 + 0.5) / k as f64 * r;
            let g = phi.gradient([0.5 + rho, 0.5]);
            g[0].hypot(g[1]) * 2.0 * std::f64::consts::PI * rho * r / k as f64
        })
        .sum();
    assert!((num - phi.grad_l1()).abs() < 1e-8);
    assert!(TestFunction::new([0.1, 0.5], 0.2, &square()).is_err());
}

#[test]
fn battery_fits_domains() {
    for dom in [square(), Polygon::regular([0.5, 0.5], 0.5, 64)] {
        let b = bump_battery(&dom).unwrap();
        assert_eq!(b.len(), 9);
        for phi in &b {
            assert!(dom.boundary_distance(phi.center) >= phi.radius);
        }
    }
}

#[test]
fn energy_of_single_cell() {
    let w = PAMap::affine(square(), Mat2::new(2.0, 0.0, 5.0, 7.0), [0.0, 0.0], CellTag::Untagged);
    assert!((lq_energy(&w, 3.0, &square()) - 8.0).abs() < 1e-12);
    let half = Polygon::rect(0.0, 0.0, 0.5, 1.0);
    assert!((lq_energy(&w, 3.0, &half) - 4.0).abs() < 1e-12);
    assert!((lq_energy_domain(&w, 2.5) - 2f64.powf(2.5)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn energy_is_additive(c in 0.05f64..0.95, q in 1.0f64..4.0) {
        let e11 = Mat2::outer([1.0, 0.0], [0.6, 0.8]);
        let w = simple_laminate_map(&square(), Mat2::new(0.0, 1.0, 0.0, 0.0), [0.0, 0.0], Mat2::new(0.0, 1.0, 0.0, 0.0) + e11, Mat2::new(0.0, 1.0, 0.0, 0.0) - e11, 0.5, 0.3).unwrap();
        let left = Polygon::rect(0.0, 0.0, c, 1.0);
        let right = Polygon::rect(c, 0.0, 1.0, 1.0);
        let total = lq_energy(&w, q, &square());
        prop_assert!((lq_energy(&w, q, &left) + lq_energy(&w, q, &right) - total).abs() < 1e-10 * total);
    }
}

#[test]
fn affine_maps_have_no_residual() {
    let w = PAMap::affine(square(), Mat2::new(1.5, -0.7, 2.0, 3.0), [0.1, 0.2], CellTag::Untagged);
    for phi in bump_battery(&square()).unwrap() {
        assert!(plap_residual(&w, &phi, 3.0) < 1e-10);
    }
}

#[test]
fn two_cell_residual_is_interface_flux_jump() {
    // the pairing reduces to |(F_lo − F_hi)·n| ∫_line φ, and ∫_line φ / ‖∇φ‖_{L¹} = 1/π for a
    // line through the bump centre
    let n = [0.6, 0.8];
    let g = [1.0, 1.0];
    for (p, alpha) in [(1.5, 0.7), (3.0, 0.7), (3.0, -0.4)] {
        let w = two_cell_map(g, n, alpha);
        assert!(w.continuity_gap() < 1e-12);
        assert!(w.area_defect() < 1e-12);
        let (fl, fh) = (flux(g, p), flux([g[0] - alpha * n[0], g[1] - alpha * n[1]], p));
        let oracle = ((fl[0] - fh[0]) * n[0] + (fl[1] - fh[1]) * n[1]).abs() / std::f64::consts::PI;
        let r = plap_residual(&w, &center_bump(), p);
        assert!((r - oracle).abs() < 1e-12 * oracle.max(1.0), "p {p}: {r} vs {oracle}");
        assert!(r > 0.0);
    }
    // no jump, no residual
    assert!(plap_residual(&two_cell_map(g, n, 0.0), &center_bump(), 3.0) < 1e-12);
}

#[test]
fn non_solution_has_residual_and_order_doubling_is_stable() {
    let e11 = Mat2::outer([1.0, 0.0], [1.0, 0.0]);
    let a = Mat2::new(0.0, 1.0, 0.0, 0.0);
    let w = simple_laminate_map(&square(), a, [0.0, 0.0], a + e11, a - e11, 0.5, 0.5).unwrap();
    let phi = TestFunction::new([0.45, 0.5], 0.3, &square()).unwrap();
    let r8 = plap_residual_with(&w, &phi, 3.0, 8);
    let r16 = plap_residual_with(&w, &phi, 3.0, 16);
    assert!(r8 > 1e-3);
    assert!((r8 - r16).abs() < 1e-10);
}

#[test]
fn inclusion_residual_values() {
    let on = kp_point(0.7, -1.2, 3.0).unwrap();
    let w = PAMap::affine(square(), on, [0.0, 0.0], CellTag::Untagged);
    let r = inclusion_residual(&w, 3.0);
    assert!(r.max < 1e-14 && r.mean < 1e-14);
    let off = PAMap::affine(square(), Mat2::new(0.3, 0.9, 2.0, -1.0), [0.0, 0.0], CellTag::Untagged);
    assert!(inclusion_residual(&off, 3.0).mean > 0.1);
}

#[test]
fn statistics_on_tagged_cells() {
    let u1 = Mat2::new(2.0, 1.0, 0.0, -3.0);
    let u2 = Mat2::new(-2.0, 1.1, 0.0, 3.0);
    let bad = Mat2::new(-2.0, 0.9, 0.0, 3.0);
    let cells = vec![
        AffineCell {
            poly: Polygon::rect(0.0, 0.0, 0.5, 1.0),
            a: u1,
            b: [0.0, 0.0],
            tag: CellTag::Set(SetTag::u1(4, 4)),
            target: None,
        },
        AffineCell {
            poly: Polygon::rect(0.5, 0.0, 1.0, 0.5),
            a: u2,
            b: [0.0, 0.0],
            tag: CellTag::Set(SetTag::u2(4, 4)),
            target: None,
        },
        AffineCell {
            poly: Polygon::rect(0.5, 0.5, 1.0, 1.0),
            a: bad,
            b: [0.0, 0.0],
            tag: CellTag::Set(SetTag::u1(4, 4)),
            target: None,
        },
    ];
    let w = PAMap {
        cells,
        domain: square(),
        boundary_affine: (u1, [0.0, 0.0]),
    };
    let g = grad_statistics(&w, &grid_family(&square(), 1));
    assert_eq!(g.cells.len(), 4);
    assert_eq!(g.separation_violations, 1);
    assert_eq!(g.m12_range, (0.9, 1.1));
    // the left column has no U² mass
    assert_eq!(g.witness, 0.0);
    let u1_total: f64 = g.cells.iter().map(|c| c.u1).sum();
    assert!((u1_total - 0.75).abs() < 1e-15);
}

#[test]
fn csv_and_pgm_export() {
    let rows = vec![EnergyRow { level: 1, q: 3.0, energy: 2.5 }, EnergyRow { level: 2, q: 3.0, energy: 4.0 }];
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "level,q,energy\n1,3.0,2.5\n2,3.0,4.0\n");
    let w = two_cell_map([1.0, 1.0], [0.6, 0.8], 0.7);
    let r = sample_field(&w, 16, |c| c.a.m11.hypot(c.a.m12));
    assert_eq!((r.width, r.height), (16, 16));
    let dir = std::env::temp_dir().join(format!("stairlam-analysis-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let meta = write_pgm(&r, "grad_u", &dir.join("f.pgm"), &dir.join("f.json")).unwrap();
    let bytes = std::fs::read(dir.join("f.pgm")).unwrap();
    let header = b"P5\n16 16\n65535\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 2 * 256);
    let px: Vec<u16> = bytes[header.len()..].chunks(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect();
    for (v, p) in r.data.iter().zip(&px) {
        let back = meta.lo + (meta.hi - meta.lo) * (*p as f64 - 1.0) / 65534.0;
        assert!((back - v).abs() <= (meta.hi - meta.lo) / 65534.0);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
