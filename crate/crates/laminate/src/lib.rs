//! Finitely supported probability measures on 2×2 matrices, built by elementary
//! rank-one splittings and carrying a replayable certificate of how they were built.

mod io;

pub use io::{read_jsonl, write_jsonl};

use serde::{Deserialize, Serialize};
use stairlam_core::{rank_one_gap, Mat2, SetTag};
use thiserror::Error;

/// Relative entrywise tolerance under which two atoms are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Default rank-one tolerance on the normalized determinant.
pub const TOL_RANK: f64 = 1e-9;
/// Default tolerance on weight bookkeeping.
pub const TOL_SUM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaminateError {
    #[error("atom is off the segment [B, C]: residual {residual:e}, s = {s}")]
    NotOnSegment { residual: f64, s: f64 },
    #[error("B - C is not rank one: normalized determinant {gap:e}")]
    NotRankOne { gap: f64 },
    #[error("split fraction {0} outside (0, 1]")]
    BadFraction(f64),
    #[error("atom index {idx} out of range for {len} atoms")]
    BadIndex { idx: usize, len: usize },
    #[error("malformed laminate record: {0}")]
    Parse(String),
}

/// One atom `λ_i δ_{A_i}` with an optional provenance tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtom {
    #[serde(rename = "w")]
    pub weight: f64,
    #[serde(rename = "m")]
    pub atom: Mat2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<SetTag>,
}

/// One elementary splitting: mass `λ·weight(parent)` moves onto `B` and `C`
/// with weights `s` and `1 - s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub parent: usize,
    pub b: Mat2,
    pub c: Mat2,
    pub s: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_b: Option<SetTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_c: Option<SetTag>,
}

/// A laminate of finite order together with its splitting certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Laminate {
    pub atoms: Vec<WeightedAtom>,
    pub cert: Vec<SplitRecord>,
    pub root: Mat2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_tag: Option<SetTag>,
}

/// Outcome of a certificate replay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertReport {
    pub ok: bool,
    /// `(record index, reason)` for every failed record.
    pub failures: Vec<(usize, String)>,
    pub max_weight_diff: f64,
    pub max_atom_diff: f64,
}

fn scale_of(ms: &[Mat2]) -> f64 {
    ms.iter().fold(1.0_f64, |s, m| s.max(m.max_abs()))
}

/// Recovers `s` with `A ≈ s B + (1 - s) C` by orthogonal projection and reports the residual
/// relative to the scale of the three matrices.
pub fn segment_fraction(a: Mat2, b: Mat2, c: Mat2) -> (f64, f64) {
    let d = b - c;
    let nd = d.norm_sq();
    if nd == 0.0 {
        return (f64::NAN, f64::INFINITY);
    }
    let s = (a - c).dot(d) / nd;
    let res = (a - (c + d * s)).norm() / scale_of(&[a, b, c]);
    (s, res)
}

/// Validates one split against rank-one, on-segment and fraction conditions.
pub fn check_split(a: Mat2, b: Mat2, c: Mat2, lambda: f64, tol_rank: f64) -> Result<f64, LaminateError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(LaminateError::BadFraction(lambda));
    }
    let gap = rank_one_gap(b - c);
    if !(gap <= tol_rank) {
        return Err(LaminateError::NotRankOne { gap });
    }
    let (s, residual) = segment_fraction(a, b, c);
    if !(residual <= tol_rank) || !(s > 0.0 && s < 1.0) {
        return Err(LaminateError::NotOnSegment { residual, s });
    }
    Ok(s)
}

/// Validates a split whose fraction `s` is known analytically; more accurate than
/// projection when `s` is within rounding of 0 or 1.
pub fn check_split_with(a: Mat2, b: Mat2, c: Mat2, s: f64, lambda: f64, tol_rank: f64) -> Result<(), LaminateError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(LaminateError::BadFraction(lambda));
    }
    let gap = rank_one_gap(b - c);
    if !(gap <= tol_rank) {
        return Err(LaminateError::NotRankOne { gap });
    }
    let residual = (a - (c + (b - c) * s)).norm() / scale_of(&[a, b, c]);
    if !(residual <= tol_rank) || !(s > 0.0 && s < 1.0) {
        return Err(LaminateError::NotOnSegment { residual, s });
    }
    Ok(())
}

impl Laminate {
    pub fn dirac(m: Mat2) -> Self {
        Self::dirac_tagged(m, None)
    }

    pub fn dirac_tagged(m: Mat2, tag: Option<SetTag>) -> Self {
        Laminate {
            atoms: vec![WeightedAtom { weight: 1.0, atom: m, tag }],
            cert: Vec::new(),
            root: m,
            root_tag: tag,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn find_or_push(&mut self, m: Mat2, tag: Option<SetTag>, weight: f64) -> usize {
        let tol = MERGE_TOL * m.max_abs().max(1.0);
        if let Some(k) = self.atoms.iter().position(|x| x.atom.max_abs_diff(m) <= tol) {
            self.atoms[k].weight += weight;
            k
        } else {
            self.atoms.push(WeightedAtom { weight, atom: m, tag });
            self.atoms.len() - 1
        }
    }

    /// Raw split; the caller has validated the record. Returns the new positions of `B` and `C`.
    fn apply(&mut self, r: &SplitRecord) -> (usize, usize) {
        let moved = r.lambda * self.atoms[r.parent].weight;
        let removed = r.lambda == 1.0;
        if removed {
            self.atoms.remove(r.parent);
        } else {
            self.atoms[r.parent].weight -= moved;
        }
        let ib = self.find_or_push(r.b, r.tag_b, r.s * moved);
        let ic = self.find_or_push(r.c, r.tag_c, (1.0 - r.s) * moved);
        (ib, ic)
    }

    /// In-place elementary splitting of atom `idx` onto `[B, C]`; returns the positions of `B` and `C`.
    pub fn split_in_place(
        &mut self,
        idx: usize,
        b: Mat2,
        tag_b: Option<SetTag>,
        c: Mat2,
        tag_c: Option<SetTag>,
        lambda: f64,
    ) -> Result<(usize, usize), LaminateError> {
        self.split_in_place_tol(idx, b, tag_b, c, tag_c, lambda, TOL_RANK)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn split_in_place_tol(
        &mut self,
        idx: usize,
        b: Mat2,
        tag_b: Option<SetTag>,
        c: Mat2,
        tag_c: Option<SetTag>,
        lambda: f64,
        tol_rank: f64,
    ) -> Result<(usize, usize), LaminateError> {
        let len = self.atoms.len();
        let parent = self.atoms.get(idx).ok_or(LaminateError::BadIndex { idx, len })?.atom;
        let s = check_split(parent, b, c, lambda, tol_rank)?;
        let rec = SplitRecord {
            parent: idx,
            b,
            c,
            s,
            lambda,
            tag_b,
            tag_c,
        };
        let out = self.apply(&rec);
        self.cert.push(rec);
        Ok(out)
    }

    /// As [`Laminate::split_in_place_tol`] with the fraction `s` supplied instead of projected.
    #[allow(clippy::too_many_arguments)]
    pub fn split_in_place_with(
        &mut self,
        idx: usize,
        b: Mat2,
        tag_b: Option<SetTag>,
        c: Mat2,
        tag_c: Option<SetTag>,
        s: f64,
        lambda: f64,
        tol_rank: f64,
    ) -> Result<(usize, usize), LaminateError> {
        let len = self.atoms.len();
        let parent = self.atoms.get(idx).ok_or(LaminateError::BadIndex { idx, len })?.atom;
        check_split_with(parent, b, c, s, lambda, tol_rank)?;
        let rec = SplitRecord {
            parent: idx,
            b,
            c,
            s,
            lambda,
            tag_b,
            tag_c,
        };
        let out = self.apply(&rec);
        self.cert.push(rec);
        Ok(out)
    }

    /// Value-returning elementary splitting without tags.
    pub fn split_atom(&self, idx: usize, b: Mat2, c: Mat2, lambda: f64) -> Result<Laminate, LaminateError> {
        let mut out = self.clone();
        out.split_in_place(idx, b, None, c, None, lambda)?;
        Ok(out)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn barycenter(&self) -> Mat2 {
        self.atoms.iter().fold(Mat2::ZERO, |acc, a| acc + a.atom * a.weight)
    }

    /// `Σ λ_i ‖A_i‖^q` with the Frobenius norm.
    pub fn moment(&self, q: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| if q == 0.0 { a.weight } else { a.weight * a.atom.norm().powf(q) })
            .sum()
    }

    pub fn mass_on<F: Fn(&WeightedAtom) -> bool>(&self, member: F) -> f64 {
        self.atoms.iter().filter(|a| member(a)).map(|a| a.weight).sum()
    }

    /// Mass carried by atoms with the given tag.
    pub fn mass_tagged(&self, tag: SetTag) -> f64 {
        self.mass_on(|a| a.tag == Some(tag))
    }

    pub fn verify_cert(&self) -> CertReport {
        self.verify_cert_tol(TOL_RANK, TOL_SUM)
    }

    /// Replays the certificate from `δ_root`, checking every record, then compares the
    /// reproduced measure with the stored atoms.
    pub fn verify_cert_tol(&self, tol_rank: f64, tol_sum: f64) -> CertReport {
        let mut replay = Laminate::dirac_tagged(self.root, self.root_tag);
        let mut failures = Vec::new();
        for (k, r) in self.cert.iter().enumerate() {
            let Some(parent) = replay.atoms.get(r.parent).map(|a| a.atom) else {
                failures.push((k, format!("parent index {} out of range", r.parent)));
                break;
            };
            if let Err(e) = check_split_with(parent, r.b, r.c, r.s, r.lambda, tol_rank) {
                failures.push((k, e.to_string()));
            } else {
                let (s, _) = segment_fraction(parent, r.b, r.c);
                if (s - r.s).abs() > tol_rank.max(1e-9) {
                    failures.push((k, format!("recorded s = {} but projection gives {}", r.s, s)));
                }
            }
            replay.apply(r);
        }
        let mut max_w = 0.0_f64;
        let mut max_a = 0.0_f64;
        if replay.atoms.len() != self.atoms.len() {
            failures.push((
                self.cert.len(),
                format!("replay yields {} atoms, stored {}", replay.atoms.len(), self.atoms.len()),
            ));
        } else {
            for (x, y) in replay.atoms.iter().zip(&self.atoms) {
                max_w = max_w.max((x.weight - y.weight).abs());
                max_a = max_a.max(x.atom.max_abs_diff(y.atom) / x.atom.max_abs().max(1.0));
            }
            if max_w > tol_sum.max(1e-12) * 10.0 || max_a > tol_sum.max(1e-12) {
                failures.push((self.cert.len(), format!("replay mismatch: weight {max_w:e}, atom {max_a:e}")));
            }
        }
        if (self.total_mass() - 1.0).abs() > tol_sum.max(1e-12) * 10.0 {
            failures.push((self.cert.len(), format!("total mass {}", self.total_mass())));
        }
        CertReport {
            ok: failures.is_empty(),
            failures,
            max_weight_diff: max_w,
            max_atom_diff: max_a,
        }
    }
}
