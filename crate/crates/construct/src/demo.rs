//! A cheap laminate source for exercising the pipeline end to end.

use crate::induction::LaminateSource;
use crate::ConstructError;
use stairlam_core::{Mat2, SetKind, SetTag};
use stairlam_laminate::Laminate;

/// Starting index of the demo tags.
pub const DEMO_I: usize = 4;

/// Small hand-made laminates with the tag bookkeeping of the staircase but rank-one jumps of
/// size one, so several levels fit the cell budget. With `carry` off, the `U¹`/`U²` pieces are
/// only relabelled to the next level instead of being split.
pub struct DemoSource {
    pub carry: bool,
}

fn d() -> Mat2 {
    Mat2::outer([0.5, 0.0], [1.0, 0.0])
}

fn f() -> Mat2 {
    Mat2::outer([0.0, 0.5], [1.0, 0.0])
}

pub fn demo_root() -> Mat2 {
    Mat2::new(2.0, 1.0, 0.0, 1.0)
}

fn base(root: Mat2, root_tag: SetTag, i: usize, q: usize) -> Laminate {
    let mut lam = Laminate::dirac_tagged(root, Some(root_tag));
    // B weight 1/3 at S + d, E at S − d/2
    let (_, ie) = lam.split_in_place(0, root + d(), Some(SetTag::u1(i, q)), root - d() * 0.5, None, 1.0).unwrap();
    let e = root - d() * 0.5;
    lam.split_in_place(ie, e + f(), Some(SetTag::u2(i, q)), e - f(), Some(SetTag::u3(i + 1)), 1.0)
        .unwrap();
    lam
}

impl LaminateSource for DemoSource {
    fn initial(&self) -> Result<Laminate, ConstructError> {
        Ok(base(demo_root(), SetTag::u3(DEMO_I), DEMO_I, DEMO_I))
    }

    fn replacement(&self, tag: SetTag, s: Mat2, n: usize) -> Result<Option<Laminate>, ConstructError> {
        let mut lam = Laminate::dirac_tagged(s, Some(tag));
        match (tag.kind, tag.q) {
            (SetKind::U3, _) => return Ok(Some(base(s, tag, tag.i, DEMO_I + n))),
            (k, Some(q)) if !self.carry => {
                let next = SetTag {
                    kind: k,
                    i: tag.i,
                    q: Some(q + 1),
                };
                return Ok(Some(Laminate::dirac_tagged(s, Some(next))));
            }
            (k, Some(q)) => {
                let (same, other) = match k {
                    SetKind::U1 => (SetTag::u1(tag.i, q + 1), SetTag::u2(tag.i, q + 1)),
                    _ => (SetTag::u2(tag.i, q + 1), SetTag::u1(tag.i, q + 1)),
                };
                // weight 3/4 at S + d/3, 1/4 at S − d
                lam.split_in_place(0, s + d() * (1.0 / 3.0), Some(same), s - d(), Some(other), 1.0)?;
            }
            _ => return Ok(None),
        }
        Ok(Some(lam))
    }

    fn level_tags(&self, n: usize) -> Vec<SetTag> {
        stairlam_staircase::v_n_tags(DEMO_I, n)
    }

    fn separation(&self) -> f64 {
        1.0
    }

    fn rates(&self) -> (usize, f64, f64) {
        (DEMO_I, 2.0, 1.0)
    }
}
