//! Realization of one rank-one splitting by an oscillating piecewise affine map.
//!
//! With `B − C = a ⊗ n`, the map is `A x + b + a ψ(x)` where `ψ = min(φ(n·x), κ d(x))`:
//! `φ` is a sawtooth of period `h` with slopes `1−λ` and `−λ` vanishing at both ends of the
//! cell along `n`, `d` is the distance to the edges not orthogonal to `n` and `κ = ε/|a|`.
//! Where `φ` is the minimum the gradient is exactly `B` or `C`; the rest is a thin boundary
//! layer whose gradients stay within `ε` of `A`.

use crate::geometry::{Point, Polygon};
use crate::pamap::{AffineCell, CellTag, PAMap};
use crate::ConstructError;
use stairlam_core::{rank_one_gap, Mat2};

/// Guard on the number of cells of one level.
pub const MAX_CELLS: usize = 10_000_000;
/// Relative tolerance on the barycenter `A = λB + (1−λ)C`.
pub const BARYCENTER_TOL: f64 = 1e-9;
/// Rank-one tolerance on `B − C`.
pub const RANK_TOL: f64 = 1e-9;

/// Which side of the splitting a cell realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    B,
    C,
    Layer,
}

/// Decomposition `B − C = a ⊗ n` with unit `n`.
pub fn rank_one_factors(m: Mat2) -> Result<(Point, Point), ConstructError> {
    let gap = rank_one_gap(m);
    if gap > RANK_TOL {
        return Err(ConstructError::NotRankOne { gap });
    }
    let (r1, r2) = (m.row1(), m.row2());
    let r = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) { r1 } else { r2 };
    let l = r[0].hypot(r[1]);
    if l == 0.0 {
        return Ok(([0.0, 0.0], [1.0, 0.0]));
    }
    let n = [r[0] / l, r[1] / l];
    Ok((m.apply(n), n))
}

struct Plan {
    a: Point,
    n: Point,
    h: f64,
    strips: usize,
    s0: f64,
}

fn check_barycenter(a: Mat2, bm: Mat2, cm: Mat2, lambda: f64) -> Result<(), ConstructError> {
    let bar = bm * lambda + cm * (1.0 - lambda);
    let scale = a.max_abs().max(bm.max_abs()).max(cm.max_abs()).max(1.0);
    let res = a.max_abs_diff(bar);
    if res > BARYCENTER_TOL * scale {
        return Err(ConstructError::BadBarycenter { residual: res });
    }
    Ok(())
}

/// Edges whose inward normal is `±n`: the sawtooth vanishes on them once the period divides
/// the extent, so they need no taper.
fn aligned(nu: Point, n: Point) -> bool {
    (nu[0] - n[0]).hypot(nu[1] - n[1]) <= 1e-9 || (nu[0] + n[0]).hypot(nu[1] + n[1]) <= 1e-9
}

/// Period and strip count of the sawtooth. The period divides the extent of the cell along
/// `n`, keeps the sup-distance below `ε` and the boundary-layer area below `ε/2` of the cell;
/// a positive `h_floor` overrides the area condition on small cells.
fn plan(cell: &Polygon, bm: Mat2, cm: Mat2, lambda: f64, eps: f64, h_floor: f64) -> Result<Option<(Plan, f64)>, ConstructError> {
    let (a, n) = rank_one_factors(bm - cm)?;
    let na = a[0].hypot(a[1]);
    let ll = lambda * (1.0 - lambda);
    if na == 0.0 || ll <= 0.0 {
        return Ok(None);
    }
    let (lo, hi) = cell.extent(n);
    let extent = hi - lo;
    let tapered: f64 = cell
        .edges()
        .filter(|(p, q)| {
            let l = (q[0] - p[0]).hypot(q[1] - p[1]);
            l > 0.0 && !aligned([-(q[1] - p[1]) / l, (q[0] - p[0]) / l], n)
        })
        .map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1]))
        .sum();
    let h_sup = eps / (na * ll);
    let h_layer = eps * eps * cell.area() / (2.0 * tapered.max(f64::MIN_POSITIVE) * na * ll);
    let strips_f = (extent / h_sup.min(h_layer.max(h_floor))).ceil().max(1.0);
    let h = extent / strips_f;
    // two slabs per period plus a few taper pieces per edge
    let projected = 2.0 * strips_f + 8.0 * cell.len() as f64;
    Ok(Some((
        Plan {
            a,
            n,
            h,
            strips: strips_f.min(usize::MAX as f64 / 4.0) as usize,
            s0: lo,
        },
        projected,
    )))
}

/// Number of cells the realization of one splitting on `cell` would produce.
pub fn projected_cells(cell: &Polygon, bm: Mat2, cm: Mat2, lambda: f64, eps: f64, h_floor: f64) -> Result<f64, ConstructError> {
    Ok(match plan(cell, bm, cm, lambda, eps, h_floor)? {
        Some((_, p)) => p,
        None => 1.0,
    })
}

fn affine_piece(a0: Mat2, b0: Point, a: Point, grad: Point, cst: f64) -> (Mat2, Point) {
    (a0 + Mat2::outer(a, grad), [b0[0] + a[0] * cst, b0[1] + a[1] * cst])
}

/// Cells of the splitting with their sides; `room` caps the projected count.
pub(crate) fn realize(
    cell: &Polygon,
    a0: Mat2,
    b0: Point,
    bm: Mat2,
    cm: Mat2,
    lambda: f64,
    eps: f64,
    h_floor: f64,
    room: f64,
) -> Result<Vec<(AffineCell, Side)>, ConstructError> {
    if !(eps > 0.0) {
        return Err(ConstructError::Precondition(format!("epsilon must be positive, got {eps}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ConstructError::Precondition(format!("fraction {lambda} outside [0, 1]")));
    }
    check_barycenter(a0, bm, cm, lambda)?;
    let single = |side: Side, target: Mat2| {
        vec![(
            AffineCell {
                poly: cell.clone(),
                a: a0,
                b: b0,
                tag: CellTag::Untagged,
                target: Some(target),
            },
            side,
        )]
    };
    let (pl, projected) = match plan(cell, bm, cm, lambda, eps, h_floor)? {
        Some(p) => p,
        None => return Ok(if lambda > 0.0 { single(Side::B, bm) } else { single(Side::C, cm) }),
    };
    if projected > room {
        return Err(ConstructError::BudgetExceeded { projected, limit: room });
    }
    let Plan { a, n, h, strips, s0 } = pl;
    let kappa = eps / a[0].hypot(a[1]);
    let lines: Vec<(Point, f64)> = cell.inward_lines().into_iter().filter(|(nu, _)| !aligned(*nu, n)).collect();
    let area_floor = 1e-15 * cell.area();
    let mut out = Vec::with_capacity(2 * strips + 8);
    for k in 0..strips {
        let base = s0 + k as f64 * h;
        // the outermost slabs run to the cell's extremes so rounding leaves no gap
        let first = if k == 0 { f64::NEG_INFINITY } else { base };
        let last = if k + 1 == strips { f64::INFINITY } else { base + h };
        for (side, lo, hi) in [(Side::B, first, base + lambda * h), (Side::C, base + lambda * h, last)] {
            let piece = cell.clip(n, hi).clip([-n[0], -n[1]], -lo);
            if piece.is_empty() || piece.area() <= area_floor {
                continue;
            }
            // φ = g·x + c on this slab
            let (g, c, target) = match side {
                Side::B => ([(1.0 - lambda) * n[0], (1.0 - lambda) * n[1]], -(1.0 - lambda) * base, bm),
                _ => ([-lambda * n[0], -lambda * n[1]], lambda * (base + h), cm),
            };
            let phi = |x: Point| g[0] * x[0] + g[1] * x[1] + c;
            let active: Vec<usize> = (0..lines.len())
                .filter(|&e| {
                    let (nu, ce) = lines[e];
                    piece.verts.iter().any(|v| kappa * (nu[0] * v[0] + nu[1] * v[1] - ce) < phi(*v))
                })
                .collect();
            if active.is_empty() {
                let (am, bv) = affine_piece(a0, b0, a, g, c);
                out.push((
                    AffineCell {
                        poly: piece,
                        a: am,
                        b: bv,
                        tag: CellTag::Untagged,
                        target: Some(target),
                    },
                    side,
                ));
                continue;
            }
            // region where φ is the minimum
            let mut core = piece.clone();
            for &e in &active {
                let (nu, ce) = lines[e];
                core = core.clip_affine([g[0] - kappa * nu[0], g[1] - kappa * nu[1]], c + kappa * ce);
            }
            if !core.is_empty() && core.area() > area_floor {
                let (am, bv) = affine_piece(a0, b0, a, g, c);
                out.push((
                    AffineCell {
                        poly: core,
                        a: am,
                        b: bv,
                        tag: CellTag::Untagged,
                        target: Some(target),
                    },
                    side,
                ));
            }
            // regions where κ d_e is the minimum
            for &e in &active {
                let (nu, ce) = lines[e];
                let mut reg = piece.clip_affine([kappa * nu[0] - g[0], kappa * nu[1] - g[1]], -kappa * ce - c);
                for &f in &active {
                    if f != e && !reg.is_empty() {
                        let (mu, cf) = lines[f];
                        reg = reg.clip_affine([nu[0] - mu[0], nu[1] - mu[1]], cf - ce);
                    }
                }
                if !reg.is_empty() && reg.area() > area_floor {
                    let (am, bv) = affine_piece(a0, b0, a, [kappa * nu[0], kappa * nu[1]], -kappa * ce);
                    out.push((
                        AffineCell {
                            poly: reg,
                            a: am,
                            b: bv,
                            tag: CellTag::BoundaryLayer,
                            target: None,
                        },
                        Side::Layer,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Piecewise affine map equal to `A x + b` on the boundary of `cell`, within `ε` of it in sup
/// norm, with gradient `B` or `C` outside a boundary layer of relative area at most `ε/2`.
pub fn simple_laminate_map(cell: &Polygon, a: Mat2, b: Point, bm: Mat2, cm: Mat2, lambda: f64, eps: f64) -> Result<PAMap, ConstructError> {
    let cells = realize(cell, a, b, bm, cm, lambda, eps, 0.0, MAX_CELLS as f64)?;
    Ok(PAMap {
        cells: cells.into_iter().map(|c| c.0).collect(),
        domain: cell.clone(),
        boundary_affine: (a, b),
    })
}
