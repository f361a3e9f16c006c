//! Bookkeeping for the acceptance gate in `tests/acceptance.rs`.
//!
//! The gate lives in its own package so that `cargo test --workspace` runs
//! every other suite before it.

use std::io::Write;
use std::time::{Duration, Instant};

/// Individual checks that make up one acceptance criterion.
#[derive(Debug, Default)]
pub struct Criterion {
    pub checks: Vec<(bool, String)>,
}

impl Criterion {
    pub fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.0)
    }
}

/// Reference value with an absolute or relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Absolute(f64, f64),
    Relative(f64, f64),
}

impl Target {
    pub fn accepts(&self, x: f64) -> bool {
        match *self {
            Target::Absolute(v, tol) => (x - v).abs() <= tol,
            Target::Relative(v, tol) => ((x - v) / v).abs() <= tol,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Target::Absolute(v, tol) => format!("{v} +/- {tol}"),
            Target::Relative(v, tol) => format!("{v} +/- {:.0}%", tol * 100.0),
        }
    }
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Named criterion, in gate order.
pub type Entry<'a> = (&'a str, fn() -> Criterion);

/// Runs every criterion, writing the checks and one PASS/FAIL line per
/// criterion. Returns whether all passed.
pub fn run_gate<W: Write>(criteria: &[Entry], out: &mut W) -> bool {
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let (c, elapsed) = timed(run);
        for (ok, detail) in &c.checks {
            let _ = writeln!(out, "    {} {detail}", verdict(*ok));
        }
        let _ = writeln!(
            out,
            "{} criterion {name} ({:.2} s)",
            verdict(c.passed()),
            elapsed.as_secs_f64()
        );
        if !c.passed() {
            failed.push(*name);
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        let _ = writeln!(out, "failing: {}", failed.join("; "));
    }
    let _ = out.flush();
    failed.is_empty()
}
