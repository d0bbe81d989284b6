//! Finite-scale form of `a_j ∼ b_j`: a deviation table along a doubling chain, a threshold at
//! the top of the chain and a decrease requirement.

use crate::VerifyError;
use serde::Serialize;
use std::io::Write;

/// Deviation threshold at the top of a chain.
pub const SIM_TOL: f64 = 0.05;
/// Allowed distance of a fitted log-log slope from its exponent.
pub const SLOPE_TOL: f64 = 0.2;

/// One CSV row: `(quantity, i, l_or_q, deviation, fitted_constant, pass)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    pub i: usize,
    pub l_or_q: usize,
    pub deviation: f64,
    pub fitted_constant: f64,
    pub pass: bool,
}

/// Outcome of one asymptotic or bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub quantity: String,
    pub index_range: (usize, usize),
    pub max_deviation: f64,
    /// Declared tolerance on `max_deviation`.
    pub tolerance: f64,
    pub fitted: Vec<(String, f64)>,
    pub pass: bool,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

impl AsymptoticReport {
    pub fn new(quantity: &str, index_range: (usize, usize), tolerance: f64) -> Self {
        AsymptoticReport {
            quantity: quantity.to_string(),
            index_range,
            max_deviation: 0.0,
            tolerance,
            fitted: Vec::new(),
            pass: true,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn fit(&mut self, name: &str, value: f64) {
        self.fitted.push((name.to_string(), value));
    }

    pub fn fitted(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn row(&mut self, quantity: &str, i: usize, l_or_q: usize, deviation: f64, fitted_constant: f64, pass: bool) {
        self.rows.push(ReportRow {
            quantity: quantity.to_string(),
            i,
            l_or_q,
            deviation,
            fitted_constant,
            pass,
        });
    }

    /// Records a sub-check that counts towards `max_deviation` and `pass`.
    pub fn gate(&mut self, deviation: f64, ok: bool, note: impl Into<String>) {
        if deviation.is_finite() {
            self.max_deviation = self.max_deviation.max(deviation);
        } else {
            self.max_deviation = f64::INFINITY;
        }
        if !ok {
            self.pass = false;
            self.notes.push(note.into());
        }
    }

    /// Absorbs another report's rows, gates and fitted constants under a prefix.
    pub fn merge(&mut self, other: AsymptoticReport) {
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.pass &= other.pass;
        for (n, v) in other.fitted {
            self.fitted.push((format!("{}.{}", other.quantity, n), v));
        }
        self.rows.extend(other.rows);
        self.notes.extend(other.notes.into_iter().map(|n| format!("{}: {}", other.quantity, n)));
    }

    pub fn summary(&self) -> String {
        let fits: Vec<String> = self.fitted.iter().map(|(n, v)| format!("{n}={v:.4}")).collect();
        format!(
            "{} [{}..{}] max_dev={:.4e} {} {}",
            self.quantity,
            self.index_range.0,
            self.index_range.1,
            self.max_deviation,
            if self.pass { "PASS" } else { "FAIL" },
            fits.join(" ")
        )
    }
}

/// Writes the rows of several reports as one CSV table.
pub fn write_report_csv<W: Write>(out: W, reports: &[AsymptoticReport]) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        for row in &r.rows {
            w.serialize(row).map_err(|e| VerifyError::Io(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| VerifyError::Io(e.to_string()))?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Decrease along a chain with at most `allowed` inversions.
pub fn decreasing(v: &[f64], allowed: usize) -> bool {
    v.windows(2).filter(|w| !(w[1] < w[0])).count() <= allowed
}

/// `start, 2·start, …` with `len` entries.
pub fn doubling_chain(start: usize, len: usize) -> Vec<usize> {
    (0..len).map(|k| start << k).collect()
}
