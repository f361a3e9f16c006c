//! CSV and JSON emission. Numbers in CSV use 12 significant digits in
//! scientific notation so that identical runs give identical bytes.

use std::io::Write;

use squeeze_probe_core::{CoherenceSample, CoherenceTrace, SweepPoint};

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 9] = [
    "t", "abs_k1", "abs_k2", "abs_k12", "abs_l12", "re_k12", "im_k12", "re_l12", "im_l12",
];

pub const SWEEP_HEADER: [&str; 3] = ["delta_t", "measure", "best_pair"];

pub fn num(x: f64) -> String {
    // drop the sign of negative zero
    format!("{:.11e}", x + 0.0)
}

fn trace_row(s: &CoherenceSample) -> Vec<String> {
    vec![
        num(s.t),
        num(s.kappa1.norm()),
        num(s.kappa2.norm()),
        num(s.kappa12.norm()),
        num(s.lambda12.norm()),
        num(s.kappa12.re),
        num(s.kappa12.im),
        num(s.lambda12.re),
        num(s.lambda12.im),
    ]
}

pub fn write_trace<W: Write>(out: W, trace: &CoherenceTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for s in trace.iter() {
        w.write_record(trace_row(&s))?;
    }
    w.flush()?;
    Ok(())
}

/// Trace with an extra `deviation` column.
pub fn write_trace_with_deviation<W: Write>(
    out: W,
    trace: &CoherenceTrace,
    deviation: &[f64],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = TRACE_HEADER.to_vec();
    header.push("deviation");
    w.write_record(&header)?;
    for (s, d) in trace.iter().zip(deviation) {
        let mut row = trace_row(&s);
        row.push(num(*d));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Moduli only; the phase columns stay empty.
pub fn write_moduli<W: Write>(out: W, rows: &[(f64, [f64; 4])]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for (t, m) in rows {
        let mut row = vec![num(*t)];
        row.extend(m.iter().map(|&x| num(x)));
        row.extend(std::iter::repeat(String::new()).take(4));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, points: &[SweepPoint]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in points {
        w.write_record([
            num(p.delta_t),
            num(p.measure),
            p.best_pair.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: serde::Serialize>(mut out: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
