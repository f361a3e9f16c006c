//! Command-line flags, the JSON config file that mirrors them, and their
//! translation into core inputs.
//!
//! Every subcommand accepts the same flag set; flags a command does not use
//! are ignored. A config file is a flat JSON object whose keys are the flag
//! names with `-` replaced by `_`. Flags given on the command line win.
//!
//! Times are in units of `1/omega_c`. With `--omega-c W` they are read in
//! physical units and multiplied by `W` on input; qubit energies are divided
//! by `W`. Output is always in units of `1/omega_c`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use squeeze_probe_core::{BathSpec, BellPair, GaussianStateSpec, Schedule, TwoModeCovariance};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "squeeze-probe",
    version,
    about = "Two-qubit dephasing probes of squeezed two-mode environments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence factors on a time grid (CSV).
    Dynamics(Opts),
    /// Non-Markovianity for one schedule (JSON).
    Measure(Opts),
    /// Non-Markovianity against the window length (CSV).
    Sweep(Opts),
    /// Window length that maximizes non-Markovianity (JSON).
    Optimal(Opts),
    /// Fit the squeezing parameter to measured backflow (JSON).
    Estimate(Opts),
    /// Coherence factors from the discretized mode sum (CSV).
    Oracle(Opts),
    /// Coherence moduli without free bath evolution (CSV).
    Approx(Opts),
}

impl Command {
    pub fn opts(&self) -> &Opts {
        match self {
            Command::Dynamics(o)
            | Command::Measure(o)
            | Command::Sweep(o)
            | Command::Optimal(o)
            | Command::Estimate(o)
            | Command::Oracle(o)
            | Command::Approx(o) => o,
        }
    }

    pub fn opts_mut(&mut self) -> &mut Opts {
        match self {
            Command::Dynamics(o)
            | Command::Measure(o)
            | Command::Sweep(o)
            | Command::Optimal(o)
            | Command::Estimate(o)
            | Command::Oracle(o)
            | Command::Approx(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateArg {
    Sts,
    Epr,
    Mts,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum PairArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

impl From<PairArg> for BellPair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::I => BellPair::I,
            PairArg::II => BellPair::II,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Opts {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Environment state family.
    #[arg(long, value_enum)]
    pub state: Option<StateArg>,
    /// Squeezing parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Squeezing angle in radians (squeezed thermal states).
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Mean thermal photon number of mode 1.
    #[arg(long, allow_negative_numbers = true)]
    pub n1: Option<f64>,
    /// Mean thermal photon number of mode 2.
    #[arg(long, allow_negative_numbers = true)]
    pub n2: Option<f64>,
    /// Covariance entries a,b,c_plus,c_minus[,c12,c21] for --state custom.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub cov: Option<Vec<f64>>,

    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha2: Option<f64>,
    /// Cutoff frequency; rescales input times.
    #[arg(long, allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps2: Option<f64>,

    /// Window length.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Windows (0, dt, dt, 2 dt); the default when only --dt is given.
    #[arg(long)]
    pub consecutive: bool,
    /// Pause between the two windows.
    #[arg(long, allow_negative_numbers = true)]
    pub gap: Option<f64>,
    /// Explicit windows t1_start t1_end t2_start t2_end.
    #[arg(long, num_args = 4, value_names = ["T1S", "T1F", "T2S", "T2F"])]
    pub windows: Option<Vec<f64>>,
    /// Delay of the whole schedule (mode-sum oracle only).
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,

    /// Number of time steps of the output grid.
    #[arg(long)]
    pub steps: Option<usize>,
    /// End of the output grid; defaults to the end of the second window.
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,

    /// Grid density of the non-Markovianity measure.
    #[arg(long)]
    pub points_per_window: Option<usize>,
    /// Time after the second window included in the measure.
    #[arg(long, allow_negative_numbers = true)]
    pub margin: Option<f64>,
    /// Restrict to one Bell pair.
    #[arg(long, value_enum)]
    pub pair: Option<PairArg>,

    #[arg(long, allow_negative_numbers = true)]
    pub dt_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic sweep spacing.
    #[arg(long)]
    pub log: bool,

    /// Search interval: window lengths for `optimal`, squeezing for `estimate`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bracket: Option<Vec<f64>>,
    /// Measurement CSV with columns delta_t, observed, pair.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Exit with code 4 on a model-mismatch warning.
    #[arg(long)]
    pub strict: bool,
    /// Residual above which the fit is flagged as a model mismatch.
    #[arg(long, allow_negative_numbers = true)]
    pub mismatch_threshold: Option<f64>,

    /// Use the mode-sum oracle in `dynamics`.
    #[arg(long)]
    pub oracle: bool,
    /// Add closed-form deviations to the oracle output.
    #[arg(long)]
    pub compare: bool,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    /// Tolerance reported by `oracle --compare`.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
}

macro_rules! fill {
    ($dst:ident, $src:ident; $($opt:ident),*; $($flag:ident),*) => {
        $( if $dst.$opt.is_none() { $dst.$opt = $src.$opt.take(); } )*
        $( $dst.$flag |= $src.$flag; )*
    };
}

impl Opts {
    /// Fills unset flags from `file`.
    pub fn merge_from(&mut self, mut file: Opts) {
        let this = self;
        fill!(this, file;
            output, state, r, phi, n1, n2, cov, alpha1, alpha2, omega_c, eps1, eps2,
            dt, gap, windows, shift, steps, t_max, points_per_window, margin, pair,
            dt_min, dt_max, points, bracket, input, mismatch_threshold, modes, omega_max, tolerance;
            consecutive, log, strict, oracle, compare);
    }

    /// Applies the `--config` file, if any.
    pub fn resolve(&mut self) -> Result<(), CliError> {
        if let Some(path) = self.config.clone() {
            self.merge_from(load_config(&path)?);
        }
        Ok(())
    }

    pub fn time_scale(&self) -> Result<f64, CliError> {
        match self.omega_c {
            None => Ok(1.0),
            Some(w) if w > 0.0 && w.is_finite() => Ok(w),
            Some(_) => Err(CliError::config("--omega-c must be positive")),
        }
    }

    /// An input time converted to units of `1/omega_c`.
    pub fn scaled(&self, t: f64) -> Result<f64, CliError> {
        Ok(t * self.time_scale()?)
    }

    pub fn covariance(&self) -> Result<TwoModeCovariance, CliError> {
        let state = self
            .state
            .ok_or_else(|| CliError::config("--state is required"))?;
        let need_r = || {
            self.r
                .ok_or_else(|| CliError::config("--r is required for this state"))
        };
        let spec = match state {
            StateArg::Sts => GaussianStateSpec::Sts {
                r: need_r()?,
                phi: self.phi.unwrap_or(0.0),
                n1: self.n1.unwrap_or(0.0),
                n2: self.n2.unwrap_or(0.0),
            },
            StateArg::Epr => GaussianStateSpec::Epr { r: need_r()? },
            StateArg::Mts => match (self.n1, self.n2, self.r) {
                (None, None, Some(r)) => GaussianStateSpec::mts_from_r(r),
                (None, None, None) => {
                    return Err(CliError::config("--state mts needs --r or --n1/--n2"))
                }
                (n1, n2, _) => GaussianStateSpec::Mts {
                    n1: n1.unwrap_or(0.0),
                    n2: n2.unwrap_or(0.0),
                },
            },
            StateArg::Custom => {
                let c = self
                    .cov
                    .as_deref()
                    .ok_or_else(|| CliError::config("--state custom needs --cov"))?;
                let (c12, c21) = match c.len() {
                    4 => (0.0, 0.0),
                    6 => (c[4], c[5]),
                    _ => return Err(CliError::config("--cov takes 4 or 6 values")),
                };
                GaussianStateSpec::Custom(TwoModeCovariance {
                    a: c[0],
                    b: c[1],
                    c_plus: c[2],
                    c_minus: c[3],
                    c12,
                    c21,
                })
            }
        };
        Ok(spec.covariance()?)
    }

    pub fn bath(&self) -> Result<BathSpec, CliError> {
        let w = self.time_scale()?;
        Ok(BathSpec::new(
            self.alpha1.unwrap_or(1.0),
            self.alpha2.unwrap_or(1.0),
            1.0,
            self.eps1.unwrap_or(0.0) / w,
            self.eps2.unwrap_or(0.0) / w,
        )?)
    }

    /// Explicit `--windows`, otherwise `(0, dt, dt + gap, 2 dt + gap)`, then `--shift`.
    pub fn schedule(&self) -> Result<Schedule, CliError> {
        let base = match (&self.windows, self.dt) {
            (Some(w), None) => {
                let w: Vec<f64> = w
                    .iter()
                    .map(|&t| self.scaled(t))
                    .collect::<Result<_, _>>()?;
                Schedule::new(w[0], w[1], w[2], w[3])?
            }
            (Some(_), Some(_)) => return Err(CliError::config("--windows conflicts with --dt")),
            (None, Some(dt)) => {
                Schedule::with_gap(self.scaled(dt)?, self.scaled(self.gap.unwrap_or(0.0))?)?
            }
            (None, None) => return Err(CliError::config("a schedule needs --dt or --windows")),
        };
        match self.shift {
            Some(s) => Ok(base.shifted(self.scaled(s)?)?),
            None => Ok(base),
        }
    }

    /// `steps + 1` equally spaced times on `[0, t_max]`.
    pub fn times(&self, schedule: &Schedule) -> Result<Vec<f64>, CliError> {
        let steps = self.steps.unwrap_or(1000);
        if steps == 0 {
            return Err(CliError::config("--steps must be positive"));
        }
        let t_max = match self.t_max {
            Some(t) => self.scaled(t)?,
            None => schedule.end(),
        };
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::config("--t-max must be positive"));
        }
        Ok((0..=steps)
            .map(|i| t_max * i as f64 / steps as f64)
            .collect())
    }

    pub fn bracket(&self, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        match self.bracket.as_deref() {
            None => Ok(default),
            Some([lo, hi]) => Ok((*lo, *hi)),
            Some(_) => Err(CliError::config("--bracket takes two values")),
        }
    }
}

pub fn load_config(path: &Path) -> Result<Opts, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}
