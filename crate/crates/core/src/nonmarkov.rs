//! Trace-distance non-Markovianity over the two Bell-state pairs.
//!
//! The local factors decay monotonically, so the largest information
//! backflow is carried by one of the two Bell pairs, whose distances are
//! `|kappa12(t)|` and `|Lambda12(t)|`. The measure is the total positive
//! variation of that distance on a time grid.

use alloc::vec::Vec;

use crate::coherence::{CoherenceTrace, Dynamics};
use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;
use crate::math::exp;
use crate::model::{BathSpec, BellPair, Qubit, Schedule};
use crate::search::{golden_section_max_log, logspace};

pub const DEFAULT_POINTS_PER_WINDOW: usize = 4000;
pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const MIN_POINTS_PER_WINDOW: usize = 16;

/// Sorted sample times starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Uniform spacing of `shortest window / points_per_window` over
    /// `[0, end + margin]`, with every switching time on the grid.
    pub fn for_schedule(
        schedule: &Schedule,
        points_per_window: usize,
        margin: f64,
    ) -> Result<Self> {
        schedule.validate()?;
        if points_per_window == 0 {
            return Err(Error::InvalidTimeGrid("points_per_window must be > 0"));
        }
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::InvalidTimeGrid("margin must be finite and >= 0"));
        }
        let end = schedule.end() + margin;
        let shortest = [Qubit::First, Qubit::Second]
            .iter()
            .map(|&q| {
                let (s, e) = schedule.window(q);
                e - s
            })
            .filter(|&l| l > 0.0)
            .fold(f64::INFINITY, f64::min);
        let step = if shortest.is_finite() {
            shortest
        } else {
            end.max(1.0)
        } / points_per_window as f64;
        let mut marks = alloc::vec![
            0.0,
            schedule.t1_start,
            schedule.t1_end,
            schedule.t2_start,
            schedule.t2_end,
            end
        ];
        marks.sort_by(f64::total_cmp);
        marks.dedup();
        let mut times = alloc::vec![0.0];
        for pair in marks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let n = libm::ceil((hi - lo) / step - 1e-9).max(1.0) as usize;
            let h = (hi - lo) / n as f64;
            times.extend((1..n).map(|i| lo + h * i as f64));
            times.push(hi);
        }
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidTimeGrid("need at least two times"));
        }
        if !times.iter().all(|t| t.is_finite() && *t >= 0.0) {
            return Err(Error::InvalidTimeGrid("times must be finite and >= 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeGrid("times must be strictly increasing"));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn points_in(&self, lo: f64, hi: f64) -> usize {
        self.times.iter().filter(|&&t| t >= lo && t <= hi).count()
    }
}

/// Grid resolution used by the measure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureConfig {
    pub points_per_window: usize,
    pub margin: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            points_per_window: DEFAULT_POINTS_PER_WINDOW,
            margin: DEFAULT_MARGIN,
        }
    }
}

/// A maximal run of increasing distance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IncreaseInterval {
    pub t0: f64,
    pub t1: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovResult {
    pub measure: f64,
    pub best_pair: BellPair,
    pub increase_intervals: Vec<IncreaseInterval>,
    /// Measure of each pair, indexed by `[I, II]`.
    pub pair_measures: [f64; 2],
    pub trace: CoherenceTrace,
}

/// Total positive variation of `values` and the runs where it increases.
pub fn positive_variation(times: &[f64], values: &[f64]) -> (f64, Vec<IncreaseInterval>) {
    let mut total = 0.0;
    let mut intervals: Vec<IncreaseInterval> = Vec::new();
    let mut open: Option<IncreaseInterval> = None;
    for i in 1..values.len().min(times.len()) {
        let d = values[i] - values[i - 1];
        if d > 0.0 {
            total += d;
            match open.as_mut() {
                Some(iv) => {
                    iv.t1 = times[i];
                    iv.gain += d;
                }
                None => {
                    open = Some(IncreaseInterval {
                        t0: times[i - 1],
                        t1: times[i],
                        gain: d,
                    })
                }
            }
        } else if let Some(iv) = open.take() {
            intervals.push(iv);
        }
    }
    intervals.extend(open);
    (total, intervals)
}

fn check_resolution(schedule: &Schedule, grid: &TimeGrid) -> Result<()> {
    for q in [Qubit::First, Qubit::Second] {
        let (s, e) = schedule.window(q);
        if e > s {
            let points = grid.points_in(s, e);
            if points < MIN_POINTS_PER_WINDOW {
                return Err(Error::CoarseTimeGrid {
                    qubit: q.index(),
                    points,
                    required: MIN_POINTS_PER_WINDOW,
                });
            }
        }
    }
    Ok(())
}

fn pick(pair_measures: [f64; 2]) -> BellPair {
    // ties go to pair II
    if pair_measures[0] > pair_measures[1] {
        BellPair::I
    } else {
        BellPair::II
    }
}

/// Measure on an explicit grid, with the full trace attached.
pub fn blp_measure_on(dynamics: &Dynamics, grid: &TimeGrid) -> Result<NonMarkovResult> {
    check_resolution(dynamics.schedule(), grid)?;
    let trace = dynamics.trace(grid.times());
    let (m1, iv1) = positive_variation(&trace.times, &trace.bell_distances(BellPair::I));
    let (m2, iv2) = positive_variation(&trace.times, &trace.bell_distances(BellPair::II));
    let pair_measures = [m1, m2];
    let best_pair = pick(pair_measures);
    let (measure, increase_intervals) = match best_pair {
        BellPair::I => (m1, iv1),
        BellPair::II => (m2, iv2),
    };
    Ok(NonMarkovResult {
        measure,
        best_pair,
        increase_intervals,
        pair_measures,
        trace,
    })
}

pub fn blp_measure(
    schedule: &Schedule,
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    grid: &TimeGrid,
) -> Result<NonMarkovResult> {
    blp_measure_on(&Dynamics::new(*schedule, *bath, *cov)?, grid)
}

/// `[measure(I), measure(II)]` without keeping the trace.
pub fn pair_measures(dynamics: &Dynamics, config: &MeasureConfig) -> Result<[f64; 2]> {
    let grid =
        TimeGrid::for_schedule(dynamics.schedule(), config.points_per_window, config.margin)?;
    check_resolution(dynamics.schedule(), &grid)?;
    let mut prev: Option<[f64; 2]> = None;
    let mut total = [0.0, 0.0];
    for &t in grid.times() {
        let d = [
            exp(dynamics.ln_bell_distance(t, BellPair::I)),
            exp(dynamics.ln_bell_distance(t, BellPair::II)),
        ];
        if let Some(p) = prev {
            for k in 0..2 {
                total[k] += (d[k] - p[k]).max(0.0);
            }
        }
        prev = Some(d);
    }
    Ok(total)
}

/// Point of a duration sweep with windows `(0, dt, dt, 2 dt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub delta_t: f64,
    pub measure: f64,
    pub best_pair: BellPair,
}

fn sweep_point(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    dt: f64,
    pair: Option<BellPair>,
    config: &MeasureConfig,
) -> Result<SweepPoint> {
    let dynamics = Dynamics::new(Schedule::consecutive(dt)?, *bath, *cov)?;
    let m = pair_measures(&dynamics, config)?;
    let best_pair = pair.unwrap_or_else(|| pick(m));
    let measure = match best_pair {
        BellPair::I => m[0],
        BellPair::II => m[1],
    };
    Ok(SweepPoint {
        delta_t: dt,
        measure,
        best_pair,
    })
}

fn sweep(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    delta_ts: &[f64],
    pair: Option<BellPair>,
    config: &MeasureConfig,
) -> Result<Vec<SweepPoint>> {
    #[cfg(feature = "rayon")]
    let mut points: Vec<SweepPoint> = {
        use rayon::prelude::*;
        delta_ts
            .par_iter()
            .map(|&dt| sweep_point(bath, cov, dt, pair, config))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "rayon"))]
    let mut points: Vec<SweepPoint> = delta_ts
        .iter()
        .map(|&dt| sweep_point(bath, cov, dt, pair, config))
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| a.delta_t.total_cmp(&b.delta_t));
    Ok(points)
}

/// Measure for consecutive equal windows of each duration, ordered by duration.
pub fn measure_vs_duration(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    delta_ts: &[f64],
    config: &MeasureConfig,
) -> Result<Vec<SweepPoint>> {
    sweep(bath, cov, delta_ts, None, config)
}

/// Like [`measure_vs_duration`] with the Bell pair fixed.
pub fn rephasing_vs_duration(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    delta_ts: &[f64],
    pair: BellPair,
    config: &MeasureConfig,
) -> Result<Vec<SweepPoint>> {
    sweep(bath, cov, delta_ts, Some(pair), config)
}

/// Settings of the optimal-duration search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalConfig {
    pub coarse_points: usize,
    pub rel_tol: f64,
    pub measure: MeasureConfig,
    /// Fix the Bell pair instead of maximizing over both.
    pub pair: Option<BellPair>,
}

impl Default for OptimalConfig {
    fn default() -> Self {
        Self {
            coarse_points: 32,
            rel_tol: 1e-3,
            measure: MeasureConfig::default(),
            pair: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimalDuration {
    pub delta_t: f64,
    pub measure: f64,
    pub best_pair: BellPair,
    /// The maximum lies on the bracket edge, so the true optimum may be outside.
    pub at_edge: bool,
}

/// Duration maximizing the measure within `bracket`: log-spaced scan, then
/// golden-section refinement in `ln dt`.
pub fn optimal_duration(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    bracket: (f64, f64),
    config: &OptimalConfig,
) -> Result<OptimalDuration> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument("bracket must satisfy 0 < lo < hi"));
    }
    if config.coarse_points < 3 {
        return Err(Error::InvalidArgument(
            "coarse scan needs at least three points",
        ));
    }
    let grid = logspace(lo, hi, config.coarse_points);
    let scan = sweep(bath, cov, &grid, config.pair, &config.measure)?;
    let mut best = 0;
    for (i, p) in scan.iter().enumerate() {
        if p.measure > scan[best].measure {
            best = i;
        }
    }
    let at_edge = best == 0 || best == scan.len() - 1;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let mut failure = None;
    let refined = golden_section_max_log(
        |dt| match sweep_point(bath, cov, dt, config.pair, &config.measure) {
            Ok(p) => p.measure,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        },
        a,
        b,
        config.rel_tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let point = if refined.value >= scan[best].measure {
        sweep_point(bath, cov, refined.x, config.pair, &config.measure)?
    } else {
        scan[best]
    };
    Ok(OptimalDuration {
        delta_t: point.delta_t,
        measure: point.measure,
        best_pair: point.best_pair,
        at_edge,
    })
}
