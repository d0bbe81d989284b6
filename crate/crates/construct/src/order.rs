//! Realization of a whole laminate of finite order by replaying its splitting certificate.

use crate::geometry::{Point, Polygon};
use crate::pamap::{AffineCell, CellTag, PAMap};
use crate::simple::{projected_cells, realize, Side, MAX_CELLS};
use crate::ConstructError;
use stairlam_core::{Mat2, SetTag};
use stairlam_laminate::{Laminate, MERGE_TOL};

struct Piece {
    cell: AffineCell,
    atom: Option<usize>,
}

fn find_or_push(atoms: &mut Vec<(Mat2, Option<SetTag>)>, m: Mat2, tag: Option<SetTag>) -> usize {
    let tol = MERGE_TOL * m.max_abs().max(1.0);
    if let Some(k) = atoms.iter().position(|x| x.0.max_abs_diff(m) <= tol) {
        k
    } else {
        atoms.push((m, tag));
        atoms.len() - 1
    }
}

/// Sawtooth periods are kept above `ε_k · floor_scale / FLOOR_DIV` when a floor scale is given.
pub const FLOOR_DIV: f64 = 64.0;

/// Cells realizing `lam` on `cell` starting from `A x + b`. The `k`-th splitting uses
/// `ε_k = ε/2^{k+1}`, so the total sup-distance stays below `ε`. `room` caps the cell count.
pub(crate) fn realize_laminate(
    cell: &Polygon,
    lam: &Laminate,
    a0: Mat2,
    b0: Point,
    eps: f64,
    floor_scale: f64,
    room: f64,
) -> Result<Vec<AffineCell>, ConstructError> {
    let scale = a0.max_abs().max(lam.root.max_abs()).max(1.0);
    let res = lam.barycenter().max_abs_diff(a0);
    if res > crate::simple::BARYCENTER_TOL * scale {
        return Err(ConstructError::BadBarycenter { residual: res });
    }
    let rep = lam.verify_cert();
    if !rep.ok {
        return Err(ConstructError::Precondition(format!("laminate certificate fails: {:?}", rep.failures)));
    }
    let mut atoms: Vec<(Mat2, Option<SetTag>)> = vec![(lam.root, lam.root_tag)];
    let mut pieces = vec![Piece {
        cell: AffineCell {
            poly: cell.clone(),
            a: a0,
            b: b0,
            tag: lam.root_tag.into(),
            target: Some(lam.root),
        },
        atom: Some(0),
    }];
    let mut step_eps = eps;
    for r in &lam.cert {
        step_eps *= 0.5;
        let (moving, mut kept): (Vec<Piece>, Vec<Piece>) = pieces.into_iter().partition(|p| p.atom == Some(r.parent));
        let mut movers = Vec::with_capacity(moving.len());
        for p in moving {
            if r.lambda >= 1.0 {
                movers.push(p);
                continue;
            }
            let (part, rest) = p.cell.poly.split_area([1.0, 0.0], r.lambda);
            if !rest.is_empty() {
                kept.push(Piece {
                    cell: AffineCell { poly: rest, ..p.cell.clone() },
                    atom: p.atom,
                });
            }
            if !part.is_empty() {
                movers.push(Piece {
                    cell: AffineCell { poly: part, ..p.cell },
                    atom: p.atom,
                });
            }
        }
        let mut projected = kept.len() as f64;
        for p in &movers {
            projected += projected_cells(&p.cell.poly, r.b, r.c, r.s, step_eps, step_eps * floor_scale / FLOOR_DIV)?;
        }
        if projected > room {
            return Err(ConstructError::BudgetExceeded { projected, limit: room });
        }
        if r.lambda >= 1.0 {
            atoms.remove(r.parent);
            for p in kept.iter_mut() {
                if let Some(k) = p.atom.as_mut() {
                    if *k > r.parent {
                        *k -= 1;
                    }
                }
            }
        }
        let ib = find_or_push(&mut atoms, r.b, r.tag_b);
        let ic = find_or_push(&mut atoms, r.c, r.tag_c);
        for p in movers {
            let cells = realize(
                &p.cell.poly,
                p.cell.a,
                p.cell.b,
                r.b,
                r.c,
                r.s,
                step_eps,
                step_eps * floor_scale / FLOOR_DIV,
                room,
            )?;
            for (mut c, side) in cells {
                let atom = match side {
                    Side::B => Some(ib),
                    Side::C => Some(ic),
                    Side::Layer => None,
                };
                if let Some(k) = atom {
                    c.tag = atoms[k].1.into();
                    c.target = Some(atoms[k].0);
                }
                kept.push(Piece { cell: c, atom });
            }
        }
        pieces = kept;
    }
    Ok(pieces.into_iter().map(|p| p.cell).collect())
}

/// Piecewise affine map on `cell` equal to `A x + b` on its boundary whose gradients realize
/// the atoms of `lam` up to boundary layers.
pub fn finite_order_map(cell: &Polygon, lam: &Laminate, base: (Mat2, Point), eps: f64) -> Result<PAMap, ConstructError> {
    let cells = realize_laminate(cell, lam, base.0, base.1, eps, 0.0, MAX_CELLS as f64)?;
    Ok(PAMap {
        cells,
        domain: cell.clone(),
        boundary_affine: base,
    })
}

/// Largest `|area fraction of atom k − weight k|` over the atoms of `lam`, with cells matched
/// to atoms through their targets.
pub fn atom_fraction_error(map: &PAMap, lam: &Laminate) -> f64 {
    let total = map.domain.area();
    lam.atoms
        .iter()
        .map(|at| {
            let tol = MERGE_TOL * at.atom.max_abs().max(1.0);
            let area: f64 = map
                .cells
                .iter()
                .filter(|c| !matches!(c.tag, CellTag::BoundaryLayer) && c.target.is_some_and(|t| t.max_abs_diff(at.atom) <= tol))
                .map(|c| c.poly.area())
                .sum();
            (area / total - at.weight).abs()
        })
        .fold(0.0, f64::max)
}
