//! CSV export of the endpoint scalars.

use crate::laminates::Stair;
use crate::StairError;
use std::io::Write;

/// Rows `(i, x_i, y_i, z_i, v_i, λ_B, λ_E, λ_C, λ_D)` for `i` in `lo..=hi`.
pub fn write_endpoint_table<W: Write>(out: W, stair: &Stair, lo: usize, hi: usize) -> Result<(), StairError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| StairError::Io(e.to_string());
    w.write_record(["i", "x_i", "y_i", "z_i", "v_i", "lambda_b", "lambda_e", "lambda_c", "lambda_d"])
        .map_err(io)?;
    for i in lo.max(1)..=hi {
        let f = stair.frame(i)?;
        let l = f.lambdas();
        let row = [f.step.x, f.step.y, f.z, f.v, l.lb, l.le, l.lc, l.ld];
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|v| format!("{v:.17e}")));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| StairError::Io(e.to_string()))?;
    Ok(())
}
