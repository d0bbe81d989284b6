//! The derivative `δ_i z_i = (∂_a − i² ∂_{x0}) z_i` as a series, and its finite-difference oracle.
//!
//! Along the direction `(1, −i², 0, 0)` every `x_r` moves by `δx_r = r² − i²`, while `y_r` and
//! `g_w⁻¹(y_r)` stay fixed. Differentiating the truncated `z` series term by term gives
//! `Σ (S_i/S_ℓ) [σ_{i,ℓ} H_ℓ + ρ¹_ℓ H¹_ℓ + ρ²_ℓ H²_ℓ]`, and the tail is the derivative of the
//! tail estimate used for `z` itself, so the two stay consistent at every truncation.

use crate::VerifyError;
use stairlam_core::{g_prime, g_rate, Neumaier, Params};
use stairlam_staircase::{tail_sum, Ladder, Step, MAX_TERMS};

/// Per-step coefficients, each split as `c_a + c_b·δx_{r−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCoeffs {
    /// `−δ ln s_r`.
    pub tau_a: f64,
    pub tau_b: f64,
    /// `δ ln H¹_r`.
    pub rho1_a: f64,
    pub rho1_b: f64,
    /// `δ ln H²_r`.
    pub rho2_a: f64,
    pub rho2_b: f64,
}

impl DeltaCoeffs {
    pub fn at(s: &Step, params: &Params, p: f64) -> DeltaCoeffs {
        let r = s.k as f64;
        let w = params.w;
        let xr = s.x + s.ginv;
        let xp = s.x_prev + s.ginv;
        let yr = s.y + s.gx;
        let yp = s.y_prev + s.gx;
        let gp = g_prime(s.x_prev, w, p);
        let dx = params.a * (2.0 * r - 1.0);
        let cross_x = dx / (xr * xp);
        DeltaCoeffs {
            tau_a: -(2.0 * r - 1.0) / xr,
            tau_b: cross_x + s.dy * gp / (yr * yp),
            rho1_a: (2.0 * r - 1.0) / xr,
            rho1_b: -cross_x + (p - 2.0) * s.x_prev / (s.x_prev * s.x_prev + w * w) - gp / yp,
            rho2_a: 1.0 / params.a,
            rho2_b: -1.0 / xp,
        }
    }
}

/// `z_i` and `δ_i z_i` truncated at the same `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaValue {
    pub z: f64,
    pub dz: f64,
    pub terms: usize,
}

/// `dG_p/da`.
pub fn g_rate_slope(a: f64, p: f64) -> f64 {
    let ap = a.powf(p - 1.0);
    1.0 / ((a + 1.0) * (a + 1.0)) - (p - 1.0) * (p - 1.0) * a.powf(p - 2.0) / ((ap + 1.0) * (ap + 1.0))
}

/// A [`Ladder`] together with the derivative coefficients of each of its steps.
#[derive(Debug, Clone)]
pub struct DeltaLadder {
    ladder: Ladder,
    coeffs: Vec<DeltaCoeffs>,
}

impl DeltaLadder {
    pub fn new(params: Params, p: f64) -> Self {
        DeltaLadder {
            ladder: Ladder::new(params, p),
            coeffs: Vec::new(),
        }
    }

    pub fn from_ladder(ladder: Ladder) -> Self {
        let mut out = DeltaLadder { ladder, coeffs: Vec::new() };
        out.fill();
        out
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn params(&self) -> Params {
        self.ladder.params
    }

    fn fill(&mut self) {
        let (params, p) = (self.ladder.params, self.ladder.p);
        for k in (self.coeffs.len() + 1)..=self.ladder.len() {
            self.coeffs.push(DeltaCoeffs::at(self.ladder.step(k), &params, p));
        }
    }

    pub fn extend_to(&mut self, n: usize) -> Result<(), VerifyError> {
        self.ladder.extend_to(n)?;
        self.fill();
        Ok(())
    }

    pub fn coeffs(&self, k: usize) -> &DeltaCoeffs {
        &self.coeffs[k - 1]
    }

    /// `(z_i, δ_i z_i)` with the partial sums to `n` and the differentiated tail estimate.
    /// Requires `extend_to(n)` beforehand and `n > i + 1`.
    pub fn fixed(&self, i: usize, n: usize) -> DeltaValue {
        let lad = &self.ladder;
        let (a, p) = (lad.params.a, lad.p);
        let base = lad.log_s(i);
        let ii = (i * i) as f64;
        let m = (n / 2).max(i + 1);
        let mut z = Neumaier::new();
        let mut dz = Neumaier::new();
        let mut sigma = Neumaier::new();
        let (mut t_m, mut d_m, mut t_n, mut d_n) = (0.0, 0.0, 0.0, 0.0);
        for l in (i + 1)..=n {
            let s = lad.step(l);
            let c = &self.coeffs[l - 1];
            let lm = (l - 1) as f64;
            let dxm = lm * lm - ii;
            sigma.add(c.tau_a + c.tau_b * dxm);
            let r = (base - lad.log_s(l)).exp();
            let h = s.h1 + s.h2;
            let t = r * h;
            let d = r * (sigma.value() * h + s.h1 * (c.rho1_a + c.rho1_b * dxm) + s.h2 * (c.rho2_a + c.rho2_b * dxm));
            z.add(t);
            dz.add(d);
            if l == m {
                t_m = t;
                d_m = d;
            }
            t_n = t;
            d_n = d;
        }
        let (tail, dtail) = tail_with_derivative(t_m, d_m, t_n, d_n, m, n, a, p);
        DeltaValue {
            z: z.value() + tail,
            dz: dz.value() + dtail,
            terms: n - i,
        }
    }
}

/// The tail estimate of [`Ladder::fixed_series`] and its derivative along `δ`, given the
/// derivatives `d_m`, `d_n` of the two terms it is fitted from.
#[allow(clippy::too_many_arguments)]
fn tail_with_derivative(t_m: f64, d_m: f64, t_n: f64, d_n: f64, m: usize, n: usize, a: f64, p: f64) -> (f64, f64) {
    let alpha_th = 1.0 + 2.0 * g_rate(a, p) - 2.0 * (p - 2.0);
    let span = (n as f64 / m as f64).ln();
    let local = if m < n && t_m != 0.0 && t_n != 0.0 && t_m / t_n > 0.0 {
        Some((t_m / t_n).ln() / span)
    } else {
        None
    };
    let (alpha, dalpha) = match local {
        Some(al) if al > 1.0 => (al, (d_m / t_m - d_n / t_n) / span),
        _ => (alpha_th, 2.0 * g_rate_slope(a, p)),
    };
    let nf = n as f64;
    let f = nf / (alpha - 1.0) - 0.5 + alpha / (12.0 * nf);
    let df = -nf / ((alpha - 1.0) * (alpha - 1.0)) + 1.0 / (12.0 * nf);
    debug_assert!((tail_sum(t_n, n, alpha) - t_n * f).abs() <= 1e-12 * (t_n * f).abs().max(f64::MIN_POSITIVE));
    (t_n * f, d_n * f + t_n * df * dalpha)
}

/// Default truncation for fixed-`n` evaluations at index `i`.
pub fn default_terms(i: usize) -> usize {
    64 * (i + 1)
}

/// `δ_i z_i(P)`: doubles the truncation until two successive values agree to `tol`, relative
/// to the larger of `|δ_i z_i|` and `|z_i|/i`.
pub fn delta_z_series(i: usize, params: &Params, p: f64, tol: f64) -> Result<f64, VerifyError> {
    if i < 1 {
        return Err(VerifyError::Precondition("delta series starts at i = 1".into()));
    }
    let mut lad = DeltaLadder::new(*params, p);
    let mut n = 64usize.max(16 * (i + 1));
    lad.extend_to(n)?;
    let mut prev = lad.fixed(i, n).dz;
    loop {
        n *= 2;
        if n > MAX_TERMS {
            return Err(VerifyError::NonConvergence { i, terms: n / 2 });
        }
        lad.extend_to(n)?;
        let v = lad.fixed(i, n);
        let cur = v.dz;
        if !cur.is_finite() {
            return Err(VerifyError::NonConvergence { i, terms: n });
        }
        // `|z_i|/i` is the natural scale of `δ_i z_i`; it keeps a vanishing derivative finite
        if (cur - prev).abs() <= tol * cur.abs().max(v.z.abs() / i as f64) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Central difference of the fixed-`n` truncated `z_i` along `(1, −i², 0, 0)` with step `h`.
/// `base` must already be extended to `n`.
pub fn delta_z_fd(base: &Ladder, i: usize, n: usize, h: f64) -> f64 {
    let pr = base.params;
    let ii = (i * i) as f64;
    let eval = |sgn: f64| {
        let lad = base.rebased(pr.a + sgn * h, pr.x0 - sgn * ii * h);
        let alpha = lad.alpha();
        let (sum, _, tail, _) = lad.fixed_series(i, n, alpha, Step::h);
        sum + tail
    };
    (eval(1.0) - eval(-1.0)) / (2.0 * h)
}
