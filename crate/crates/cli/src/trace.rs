//! Trace CSV and iterate dumps.
//!
//! Numbers use the shortest representation that parses back to the same
//! `f64`. `elapsed_ms` is written as `0` unless timing is requested, so that
//! repeated runs produce identical bytes.

use std::io::Write;

use hopx_core::TraceRecord;

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 7] = [
    "iter",
    "lambda_norm",
    "t_k",
    "sigma_k",
    "objective",
    "kkt_residual",
    "elapsed_ms",
];

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_trace<W: Write>(out: W, trace: &[TraceRecord], timing: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in trace {
        let ms = if timing { r.elapsed.as_secs_f64() * 1e3 } else { 0.0 };
        w.write_record([
            r.iter.to_string(),
            num(r.lambda_norm),
            num(r.t_k),
            num(r.sigma_k),
            num(r.objective),
            num(r.kkt_residual),
            num(ms),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per record: `iter`, then `λᵏ` components, then `xᵏ` components.
/// Records without stored iterates are skipped.
pub fn write_dump<W: Write>(out: W, trace: &[TraceRecord]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    for r in trace {
        if let (Some(lambda), Some(x)) = (&r.lambda, &r.x) {
            let mut row = vec![r.iter.to_string()];
            row.extend(lambda.iter().map(|&v| num(v)));
            row.extend(x.iter().map(|&v| num(v)));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
