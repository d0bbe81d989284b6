//! Provenance tags naming the target set of a gradient.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which family of target sets a tag refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetKind {
    U1,
    U2,
    U3,
}

/// Names `U^k_{i,q}`; `q` is absent for `U³_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetTag {
    pub kind: SetKind,
    pub i: usize,
    pub q: Option<usize>,
}

impl SetTag {
    pub fn u1(i: usize, q: usize) -> Self {
        SetTag {
            kind: SetKind::U1,
            i,
            q: Some(q),
        }
    }

    pub fn u2(i: usize, q: usize) -> Self {
        SetTag {
            kind: SetKind::U2,
            i,
            q: Some(q),
        }
    }

    pub fn u3(i: usize) -> Self {
        SetTag { kind: SetKind::U3, i, q: None }
    }
}

impl fmt::Display for SetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q {
            Some(q) => write!(f, "{:?}({}, {})", self.kind, self.i, q),
            None => write!(f, "{:?}({})", self.kind, self.i),
        }
    }
}
