//! The parameter box `Q(c)`, the rate function `G_p` and global model configuration.

use crate::CoreError;
use serde::{Deserialize, Serialize};

/// Lower edge of the `x0`, `y0`, `w` ranges.
pub const BOX_LO: f64 = 0.75;
/// Upper edge of the `x0`, `y0`, `w` ranges.
pub const BOX_HI: f64 = 1.25;
/// Sample count used when validating `G_p` on `[c, 2c]`.
pub const C_SAMPLES: usize = 1000;

const SCAN_STEPS: usize = 60;

/// A point `P = (a, x0, y0, w)`; `a ∈ [c, 2c]` and the rest lie in `[3/4, 5/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
}

impl Params {
    pub const fn new(a: f64, x0: f64, y0: f64, w: f64) -> Self {
        Params { a, x0, y0, w }
    }

    /// Center of the box.
    pub fn center(c: f64) -> Self {
        Params::new(1.5 * c, 1.0, 1.0, 1.0)
    }

    /// The point at fractional box coordinates, each in `[0, 1]`.
    pub fn at_fractions(c: f64, f: [f64; 4]) -> Self {
        let span = BOX_HI - BOX_LO;
        Params::new(c * (1.0 + f[0]), BOX_LO + span * f[1], BOX_LO + span * f[2], BOX_LO + span * f[3])
    }

    /// Tensor lattice over the given fractions, `a` varying slowest.
    pub fn lattice(c: f64, fracs: &[f64]) -> Vec<Params> {
        let mut out = Vec::with_capacity(fracs.len().pow(4));
        for &fa in fracs {
            for &fx in fracs {
                for &fy in fracs {
                    for &fw in fracs {
                        out.push(Params::at_fractions(c, [fa, fx, fy, fw]));
                    }
                }
            }
        }
        out
    }

    /// Membership in the closed box.
    pub fn in_closed_box(&self, c: f64) -> bool {
        let tol = 1e-12;
        let inr = |v: f64| v >= BOX_LO - tol && v <= BOX_HI + tol;
        self.a >= c * (1.0 - tol) && self.a <= 2.0 * c * (1.0 + tol) && inr(self.x0) && inr(self.y0) && inr(self.w)
    }

    /// Membership in the open box.
    pub fn in_open_box(&self, c: f64) -> bool {
        let inr = |v: f64| v > BOX_LO && v < BOX_HI;
        self.a > c && self.a < 2.0 * c && inr(self.x0) && inr(self.y0) && inr(self.w)
    }
}

/// `G_p(a) = a/(a+1) + (p-1)/(a^{p-1}+1)`.
pub fn g_rate(a: f64, p: f64) -> f64 {
    a / (a + 1.0) + (p - 1.0) / (a.powf(p - 1.0) + 1.0)
}

/// `max{1, p-1}`, the lower barrier for `G_p` on `[c, 2c]`.
pub fn threshold(p: f64) -> f64 {
    1.0_f64.max(p - 1.0)
}

/// `γ = 1 + min{1, 2(p-1)}`.
pub fn gamma(p: f64) -> f64 {
    1.0 + 1.0_f64.min(2.0 * (p - 1.0))
}

/// Minimum and maximum of `G_p` over `n` equispaced samples of `[c, 2c]`, endpoints included.
pub fn g_range(c: f64, p: f64, n: usize) -> (f64, f64) {
    let n = n.max(2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..n {
        let a = c * (1.0 + k as f64 / (n - 1) as f64);
        let g = g_rate(a, p);
        lo = lo.min(g);
        hi = hi.max(g);
    }
    (lo, hi)
}

/// Checks `max{1,p-1} < G_p < max{1,p-1} + 1/2` on a dense sample of `[c, 2c]`.
pub fn validate_c(c: f64, p: f64) -> Result<(f64, f64), CoreError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(CoreError::NoAdmissibleC {
            p,
            reason: format!("c = {c} is not positive"),
        });
    }
    let t = threshold(p);
    let (lo, hi) = g_range(c, p, C_SAMPLES);
    if lo > t && hi < t + 0.5 {
        Ok((lo, hi))
    } else {
        Err(CoreError::NoAdmissibleC {
            p,
            reason: format!("G_p ranges over [{lo}, {hi}] on [c, 2c] with c = {c}, outside ({t}, {})", t + 0.5),
        })
    }
}

/// First admissible `c` of a geometric scan: halving from 1/2 when `p > 2`,
/// doubling from 4 when `p < 2`.
pub fn choose_c(p: f64) -> Result<f64, CoreError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(CoreError::NoAdmissibleC {
            p,
            reason: "p must exceed 1".into(),
        });
    }
    if p == 2.0 {
        return Err(CoreError::NoAdmissibleC {
            p,
            reason: "G_2 is identically 1".into(),
        });
    }
    let (mut c, factor) = if p > 2.0 { (0.5, 0.5) } else { (4.0, 2.0) };
    for _ in 0..SCAN_STEPS {
        if validate_c(c, p).is_ok() {
            return Ok(c);
        }
        c *= factor;
    }
    Err(CoreError::NoAdmissibleC {
        p,
        reason: "geometric scan exhausted".into(),
    })
}

/// Integrability margin halfway to the barrier: `(1+eps) max{1,p-1} < min G_p` with room to spare.
pub fn eps_auto(c: f64, p: f64) -> f64 {
    let (lo, _) = g_range(c, p, C_SAMPLES);
    0.5 * (lo / threshold(p) - 1.0)
}

/// Global configuration shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub c: f64,
    pub t0: f64,
    #[serde(rename = "I")]
    pub i_start: usize,
    pub eps: f64,
    pub gamma: f64,
    pub tol_rank: f64,
    pub tol_sum: f64,
    pub tol_series: f64,
}

impl ModelParams {
    pub const TOL_RANK: f64 = 1e-9;
    pub const TOL_SUM: f64 = 1e-12;
    pub const TOL_SERIES: f64 = 1e-10;

    /// Validated constructor.
    pub fn new(p: f64, c: f64, t0: f64, i_start: usize, eps: f64) -> Result<Self, CoreError> {
        let m = Self::unchecked(p, c, t0, i_start, eps);
        m.validate()?;
        Ok(m)
    }

    /// Constructor that skips validation; used for diagnostic runs such as `p = 2`.
    pub fn unchecked(p: f64, c: f64, t0: f64, i_start: usize, eps: f64) -> Self {
        ModelParams {
            p,
            c,
            t0,
            i_start,
            eps,
            gamma: gamma(p),
            tol_rank: Self::TOL_RANK,
            tol_sum: Self::TOL_SUM,
            tol_series: Self::TOL_SERIES,
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let bad = |s: String| Err(CoreError::InvalidModel(s));
        if !(self.p > 1.0) || self.p == 2.0 {
            return bad(format!("p = {} must exceed 1 and differ from 2", self.p));
        }
        let (lo, _) = validate_c(self.c, self.p)?;
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return bad(format!("t0 = {} outside (0, 1)", self.t0));
        }
        if self.i_start == 0 {
            return bad("I must be positive".into());
        }
        if !(self.eps > 0.0) || (1.0 + self.eps) * threshold(self.p) >= lo {
            return bad(format!("eps = {} violates (1+eps) max(1,p-1) < min G_p = {lo}", self.eps));
        }
        if !(self.tol_rank > 0.0 && self.tol_sum > 0.0 && self.tol_series > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// `(min, max)` of `G_p` over the dense sample of `[c, 2c]`.
    pub fn g_bounds(&self) -> (f64, f64) {
        g_range(self.c, self.p, C_SAMPLES)
    }
}
