//! Per-index quantities along the staircase for one fixed `P`, with prefix sums of
//! `ln s_k` so that every ratio `S_i / S_ℓ` is one subtraction and one exponential.

use crate::seq::{dy, sequences};
use crate::StairError;
use stairlam_core::{g_inverse, g_rate, radial_factor, Neumaier, Params};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1 << 24;

/// Everything the staircase needs about the step from index `k-1` to `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub k: usize,
    pub x_prev: f64,
    pub x: f64,
    pub y_prev: f64,
    pub y: f64,
    /// `y_k - y_{k-1}`.
    pub dy: f64,
    /// `g_w⁻¹(y_k)`.
    pub ginv: f64,
    /// `g_w(x_{k-1})`.
    pub gx: f64,
    /// `h_w(x_{k-1})`.
    pub hx: f64,
    /// `h_w(g_w⁻¹(y_k))`.
    pub hg: f64,
    /// `ln s_k = ln(S_k / S_{k-1})`.
    pub log_s: f64,
    pub h1: f64,
    pub h2: f64,
}

impl Step {
    pub fn at(k: usize, params: &Params, p: f64) -> Result<Step, StairError> {
        let (_, y) = sequences(k, params, p);
        let ginv = g_inverse(y, params.w, p)?;
        Ok(Self::with_ginv(k, params, p, ginv))
    }

    /// Builds the step from a precomputed `g_w⁻¹(y_k)`, which depends on `(y0, w)` only.
    pub fn with_ginv(k: usize, params: &Params, p: f64, ginv: f64) -> Step {
        let hg = radial_factor(ginv, params.w, p) * params.w;
        Self::with_ginv_hg(k, params, p, ginv, hg)
    }

    fn with_ginv_hg(k: usize, params: &Params, p: f64, ginv: f64, hg: f64) -> Step {
        debug_assert!(k >= 1);
        let (x_prev, y_prev) = sequences(k - 1, params, p);
        let (x, y) = sequences(k, params, p);
        let d = dy(k, p);
        let rf = radial_factor(x_prev, params.w, p);
        let gx = rf * x_prev;
        let hx = rf * params.w;
        let dx = params.a * (2 * k - 1) as f64;
        let log_s = -(-dx / (x + ginv)).ln_1p() - (-d / (y + gx)).ln_1p();
        let h1 = (x + ginv) / (x_prev + ginv) * (d / (y_prev + gx)) * hx;
        let h2 = dx / (x_prev + ginv) * hg;
        Step {
            k,
            x_prev,
            x,
            y_prev,
            y,
            dy: d,
            ginv,
            gx,
            hx,
            hg,
            log_s,
            h1,
            h2,
        }
    }

    pub fn h(&self) -> f64 {
        self.h1 + self.h2
    }
}

/// Euler–Maclaurin estimate of `Σ_{ℓ>n} t_n (n/ℓ)^α`.
pub fn tail_sum(t_n: f64, n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    t_n * (n / (alpha - 1.0) - 0.5 + alpha / (12.0 * n))
}

/// A truncated series together with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    pub tail: f64,
}

/// Lazily extended table of [`Step`]s for one `P`.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub params: Params,
    pub p: f64,
    steps: Vec<Step>,
    /// `ln S_k`, with `ln S_0 = 0`.
    log_s: Vec<f64>,
}

impl Ladder {
    pub fn new(params: Params, p: f64) -> Self {
        Ladder {
            params,
            p,
            steps: Vec::new(),
            log_s: vec![0.0],
        }
    }

    /// Same `(y0, w)`, new `(a, x0)`: reuses every `g_w⁻¹(y_k)` already computed.
    pub fn rebased(&self, a: f64, x0: f64) -> Ladder {
        let params = Params { a, x0, ..self.params };
        let mut out = Ladder::new(params, self.p);
        out.steps.reserve(self.steps.len());
        out.log_s.reserve(self.steps.len());
        for s in &self.steps {
            out.push(Step::with_ginv_hg(s.k, &params, self.p, s.ginv, s.hg));
        }
        out
    }

    fn push(&mut self, s: Step) {
        let last = *self.log_s.last().expect("log_s is never empty");
        self.log_s.push(last + s.log_s);
        self.steps.push(s);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn extend_to(&mut self, n: usize) -> Result<(), StairError> {
        while self.steps.len() < n {
            let k = self.steps.len() + 1;
            let s = Step::at(k, &self.params, self.p)?;
            self.push(s);
        }
        Ok(())
    }

    /// Step `k ≥ 1`; panics when not yet computed.
    pub fn step(&self, k: usize) -> &Step {
        &self.steps[k - 1]
    }

    /// `ln S_k`.
    pub fn log_s(&self, k: usize) -> f64 {
        self.log_s[k]
    }

    /// `S_i / S_ℓ` for computed indices.
    pub fn ratio(&self, i: usize, l: usize) -> f64 {
        (self.log_s[i] - self.log_s[l]).exp()
    }

    /// Theoretical decay exponent of the terms `(S_i/S_ℓ) H_ℓ ~ ℓ^{-α}`.
    pub fn alpha(&self) -> f64 {
        1.0 + 2.0 * g_rate(self.params.a, self.p) - 2.0 * (self.p - 2.0)
    }

    /// `Σ_{ℓ>i} (S_i/S_ℓ) f(step ℓ)` with adaptive truncation. The sum stops once the last term
    /// and the spread between the tail estimates from the theoretical and the locally fitted
    /// exponents both fall below `tol·|sum|`; the locally fitted tail is then added.
    pub fn weighted_series<F>(&mut self, i: usize, tol: f64, min_terms: usize, f: F) -> Result<SeriesValue, StairError>
    where
        F: Fn(&Step) -> f64,
    {
        let alpha_th = self.alpha();
        if !(alpha_th > 1.0) {
            return Err(StairError::NotSummable(alpha_th));
        }
        let mut n = min_terms.max(64).max(16 * (i + 1));
        loop {
            self.extend_to(n)?;
            let v = self.fixed_series(i, n, alpha_th, &f);
            let (sum, t_n, tail, tail_th) = v;
            let scale = sum.abs();
            if t_n.abs() <= tol * scale && (tail - tail_th).abs() <= tol * scale {
                return Ok(SeriesValue {
                    value: sum + tail,
                    terms: n - i,
                    tail,
                });
            }
            n *= 2;
            if n > MAX_TERMS {
                return Err(StairError::NonConvergence { i, terms: n / 2 });
            }
        }
    }

    /// Partial sum to a fixed `n` plus both tail estimates: `(sum, t_n, tail_local, tail_theory)`.
    pub fn fixed_series<F>(&self, i: usize, n: usize, alpha_th: f64, f: F) -> (f64, f64, f64, f64)
    where
        F: Fn(&Step) -> f64,
    {
        let base = self.log_s[i];
        let mut acc = Neumaier::new();
        let m = (n / 2).max(i + 1);
        let (mut t_m, mut t_n) = (0.0, 0.0);
        for l in (i + 1)..=n {
            let t = (base - self.log_s[l]).exp() * f(&self.steps[l - 1]);
            acc.add(t);
            if l == m {
                t_m = t;
            }
            t_n = t;
        }
        let alpha_loc = if m < n && t_m != 0.0 && t_n != 0.0 && (t_m / t_n) > 0.0 {
            (t_m / t_n).ln() / (n as f64 / m as f64).ln()
        } else {
            alpha_th
        };
        let alpha_loc = if alpha_loc > 1.0 { alpha_loc } else { alpha_th };
        (acc.value(), t_n, tail_sum(t_n, n, alpha_loc), tail_sum(t_n, n, alpha_th))
    }

    /// `z_i = Σ_{ℓ>i} (S_i/S_ℓ) H_ℓ`.
    pub fn z_series(&mut self, i: usize, tol: f64) -> Result<SeriesValue, StairError> {
        self.weighted_series(i, tol, 0, Step::h)
    }

    /// `z_0..=z_top`: the series at `top`, then the contracting backward recursion
    /// `z_{k-1} = (S_{k-1}/S_k)(H_k + z_k)`.
    pub fn z_profile(&mut self, top: usize, tol: f64) -> Result<Vec<f64>, StairError> {
        let zt = self.z_series(top, tol)?.value;
        let mut z = vec![0.0; top + 1];
        z[top] = zt;
        for k in (1..=top).rev() {
            let s = &self.steps[k - 1];
            z[k - 1] = (-s.log_s).exp() * (s.h() + z[k]);
        }
        Ok(z)
    }
}
