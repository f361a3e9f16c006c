use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use squeeze_probe_core::approx::{approx_local, approx_nonlocal};
use squeeze_probe_core::estimator::{
    default_phi_grid, estimate_r, estimate_r_phi, EstimationResult, EstimatorConfig, Family,
    Measurement,
};
use squeeze_probe_core::nonmarkov::{
    blp_measure, measure_vs_duration, optimal_duration, rephasing_vs_duration, MeasureConfig,
    OptimalConfig, DEFAULT_MARGIN, DEFAULT_POINTS_PER_WINDOW,
};
use squeeze_probe_core::oracle::{oracle_trace, ModeGrid, DEFAULT_MODES, DEFAULT_OMEGA_MAX};
use squeeze_probe_core::search::{linspace, logspace};
use squeeze_probe_core::{AngleConvention, BellPair, Dynamics, TimeGrid};

use crate::config::{Command, Opts, StateArg};
use crate::error::CliError;
use crate::output;

pub const DEFAULT_OPTIMAL_BRACKET: (f64, f64) = (1e-3, 3.0);
pub const DEFAULT_R_BRACKET: (f64, f64) = (0.0, 6.0);
pub const DEFAULT_SWEEP_POINTS: usize = 50;
pub const DEFAULT_PHI_POINTS: usize = 32;
pub const DEFAULT_COMPARE_TOLERANCE: f64 = 1e-4;

pub fn run(mut command: Command) -> Result<(), CliError> {
    command.opts_mut().resolve()?;
    match &command {
        Command::Dynamics(o) => dynamics(o),
        Command::Measure(o) => measure(o),
        Command::Sweep(o) => sweep(o),
        Command::Optimal(o) => optimal(o),
        Command::Estimate(o) => estimate(o),
        Command::Oracle(o) => oracle(o),
        Command::Approx(o) => approx(o),
    }
}

fn sink(o: &Opts) -> Result<Box<dyn Write>, CliError> {
    Ok(match &o.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn measure_config(o: &Opts) -> Result<MeasureConfig, CliError> {
    Ok(MeasureConfig {
        points_per_window: o.points_per_window.unwrap_or(DEFAULT_POINTS_PER_WINDOW),
        margin: o.scaled(o.margin.unwrap_or(DEFAULT_MARGIN))?,
    })
}

fn mode_grid(o: &Opts) -> Result<ModeGrid, CliError> {
    Ok(ModeGrid::build(
        &o.bath()?,
        o.modes.unwrap_or(DEFAULT_MODES),
        o.omega_max.unwrap_or(DEFAULT_OMEGA_MAX),
    )?)
}

fn dynamics(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let schedule = o.schedule()?;
    let times = o.times(&schedule)?;
    let trace = if o.oracle {
        oracle_trace(
            &times,
            &schedule,
            &cov,
            &mode_grid(o)?,
            AngleConvention::default(),
        )?
    } else {
        Dynamics::new(schedule, o.bath()?, cov)?.trace(&times)
    };
    let mut out = sink(o)?;
    output::write_trace(&mut out, &trace)?;
    out.flush()?;
    Ok(())
}

fn oracle(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let schedule = o.schedule()?;
    let times = o.times(&schedule)?;
    let trace = oracle_trace(
        &times,
        &schedule,
        &cov,
        &mode_grid(o)?,
        AngleConvention::default(),
    )?;
    let mut out = sink(o)?;
    if !o.compare {
        output::write_trace(&mut out, &trace)?;
        out.flush()?;
        return Ok(());
    }
    let closed = Dynamics::new(schedule, o.bath()?, cov)?.trace(&times);
    let pairs = [
        ("kappa1", &trace.kappa1, &closed.kappa1),
        ("kappa2", &trace.kappa2, &closed.kappa2),
        ("kappa12", &trace.kappa12, &closed.kappa12),
        ("lambda12", &trace.lambda12, &closed.lambda12),
    ];
    let per_factor: Vec<(&str, Vec<f64>)> = pairs
        .iter()
        .map(|(name, x, y)| {
            (
                *name,
                x.iter()
                    .zip(y.iter())
                    .map(|(p, q)| (p.norm() - q.norm()).abs())
                    .collect(),
            )
        })
        .collect();
    let rows: Vec<f64> = (0..times.len())
        .map(|i| per_factor.iter().map(|(_, d)| d[i]).fold(0.0, f64::max))
        .collect();
    output::write_trace_with_deviation(&mut out, &trace, &rows)?;
    let tolerance = o.tolerance.unwrap_or(DEFAULT_COMPARE_TOLERANCE);
    let worst = rows.iter().copied().fold(0.0, f64::max);
    for (name, d) in &per_factor {
        writeln!(
            out,
            "# max_deviation_{name},{}",
            output::num(d.iter().copied().fold(0.0, f64::max))
        )?;
    }
    writeln!(out, "# max_deviation,{}", output::num(worst))?;
    writeln!(
        out,
        "# within_tolerance,{},{}",
        output::num(tolerance),
        worst <= tolerance
    )?;
    out.flush()?;
    Ok(())
}

fn approx(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let schedule = o.schedule()?;
    let bath = o.bath()?;
    let rows = o
        .times(&schedule)?
        .into_iter()
        .map(|t| {
            let (k1, k2) = approx_local(t, &schedule, &bath, &cov);
            let (k12, l12) = approx_nonlocal(t, &schedule, &bath, &cov)?;
            Ok((t, [k1, k2, k12, l12]))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = sink(o)?;
    output::write_moduli(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

fn measure(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let schedule = o.schedule()?;
    let cfg = measure_config(o)?;
    let grid = TimeGrid::for_schedule(&schedule, cfg.points_per_window, cfg.margin)?;
    let res = blp_measure(&schedule, &o.bath()?, &cov, &grid)?;
    let (measure, pair) = match o.pair.map(BellPair::from) {
        Some(BellPair::I) => (res.pair_measures[0], BellPair::I),
        Some(BellPair::II) => (res.pair_measures[1], BellPair::II),
        None => (res.measure, res.best_pair),
    };
    let intervals = if pair == res.best_pair {
        res.increase_intervals
    } else {
        Vec::new()
    };
    let mut out = sink(o)?;
    output::write_json(
        &mut out,
        &json!({ "measure": measure, "best_pair": pair, "intervals": intervals }),
    )?;
    out.flush()?;
    Ok(())
}

fn sweep(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let lo = o.scaled(
        o.dt_min
            .ok_or_else(|| CliError::config("sweep needs --dt-min"))?,
    )?;
    let hi = o.scaled(
        o.dt_max
            .ok_or_else(|| CliError::config("sweep needs --dt-max"))?,
    )?;
    let n = o.points.unwrap_or(DEFAULT_SWEEP_POINTS);
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(CliError::config(
            "sweep needs 0 < dt-min <= dt-max and at least one point",
        ));
    }
    let dts = if n == 1 {
        vec![lo]
    } else if o.log {
        logspace(lo, hi, n)
    } else {
        linspace(lo, hi, n)
    };
    let bath = o.bath()?;
    let cfg = measure_config(o)?;
    let points = match o.pair {
        Some(p) => rephasing_vs_duration(&bath, &cov, &dts, p.into(), &cfg)?,
        None => measure_vs_duration(&bath, &cov, &dts, &cfg)?,
    };
    let mut out = sink(o)?;
    output::write_sweep(&mut out, &points)?;
    out.flush()?;
    Ok(())
}

fn optimal(o: &Opts) -> Result<(), CliError> {
    let cov = o.covariance()?;
    let (lo, hi) = o.bracket(DEFAULT_OPTIMAL_BRACKET)?;
    let cfg = OptimalConfig {
        measure: measure_config(o)?,
        pair: o.pair.map(Into::into),
        ..OptimalConfig::default()
    };
    let best = optimal_duration(&o.bath()?, &cov, (o.scaled(lo)?, o.scaled(hi)?), &cfg)?;
    let mut out = sink(o)?;
    output::write_json(&mut out, &best)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct MeasurementRow {
    delta_t: f64,
    observed: f64,
    #[serde(default)]
    pair: Option<String>,
}

pub fn read_measurements(path: &Path, time_scale: f64) -> Result<Vec<Measurement>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut data = Vec::new();
    for row in reader.deserialize() {
        let row: MeasurementRow = row?;
        let pair = match row.pair.as_deref() {
            None | Some("") => None,
            Some(s) => Some(
                BellPair::parse(s)
                    .ok_or_else(|| CliError::config(format!("unknown Bell pair {s:?}")))?,
            ),
        };
        data.push(Measurement::new(
            row.delta_t * time_scale,
            row.observed,
            pair,
        )?);
    }
    if data.is_empty() {
        return Err(CliError::config(format!(
            "{} has no measurements",
            path.display()
        )));
    }
    Ok(data)
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    r_hat: f64,
    phi_hat: Option<f64>,
    residual: f64,
    warnings: &'a [squeeze_probe_core::estimator::EstimationWarning],
    candidates: &'a [squeeze_probe_core::estimator::Candidate],
}

fn estimate(o: &Opts) -> Result<(), CliError> {
    let input = o
        .input
        .as_deref()
        .ok_or_else(|| CliError::config("estimate needs --input"))?;
    let data = read_measurements(input, o.time_scale()?)?;
    let bath = o.bath()?;
    let bracket = o.bracket(DEFAULT_R_BRACKET)?;
    let mut cfg = EstimatorConfig::default();
    if let Some(ppw) = o.points_per_window {
        cfg.measure.points_per_window = ppw;
    }
    if let Some(m) = o.mismatch_threshold {
        cfg.mismatch_threshold = m;
    }
    let state = o
        .state
        .ok_or_else(|| CliError::config("--state is required"))?;
    let (n1, n2) = (o.n1.unwrap_or(0.0), o.n2.unwrap_or(0.0));
    let res: EstimationResult = match (state, o.phi) {
        (StateArg::Epr, _) => estimate_r(&data, &Family::Epr, &bath, bracket, &cfg)?,
        (StateArg::Mts, _) => estimate_r(&data, &Family::Mts, &bath, bracket, &cfg)?,
        (StateArg::Sts, Some(phi)) => {
            estimate_r(&data, &Family::Sts { phi, n1, n2 }, &bath, bracket, &cfg)?
        }
        (StateArg::Sts, None) => estimate_r_phi(
            &data,
            n1,
            n2,
            &bath,
            bracket,
            &default_phi_grid(DEFAULT_PHI_POINTS),
            &cfg,
        )?,
        (StateArg::Custom, _) => {
            return Err(CliError::config("estimate needs --state epr, mts or sts"))
        }
    };
    let report = EstimateReport {
        r_hat: res.r_hat,
        phi_hat: res.phi_hat,
        residual: res.residual,
        warnings: &res.warnings,
        candidates: &res.candidates,
    };
    let mut out = sink(o)?;
    output::write_json(&mut out, &report)?;
    out.flush()?;
    if o.strict {
        if let Some(w) = res.warnings.iter().find(|w| w.is_model_mismatch()) {
            return Err(CliError::Strict(format!("{w:?}")));
        }
    }
    Ok(())
}
