use std::io::Write;

use super::VerificationReport;

pub const CSV_COLUMNS: [&str; 12] = [
    "scenario",
    "n",
    "m",
    "field",
    "mode",
    "quad_order",
    "lhs_norm",
    "rhs_norm",
    "residual",
    "rel_residual",
    "observed_order",
    "seconds",
];

/// Writes one row per report. With `omit_timing` the `seconds` column is 0 so
/// that repeated runs produce identical files.
pub fn write_csv<W: Write>(reports: &[VerificationReport], out: W, omit_timing: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        let observed = r.observed_order.map(|o| o.to_string()).unwrap_or_default();
        let seconds = if omit_timing { 0.0 } else { r.seconds };
        w.write_record([
            r.scenario.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.field.clone(),
            r.mode.to_string(),
            r.quad_order.to_string(),
            r.lhs.norm().to_string(),
            r.rhs.norm().to_string(),
            r.residual.to_string(),
            r.rel_residual.to_string(),
            observed,
            seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
