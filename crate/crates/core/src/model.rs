//! Parameters of the two-qubit probe: bath couplings, switching schedule and
//! initial qubit state.

use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Which of the two qubits (and its local bath).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    pub fn index(self) -> u8 {
        match self {
            Qubit::First => 1,
            Qubit::Second => 2,
        }
    }
}

/// Orthogonal Bell-state pairs. Pair I is `(|00> +- |11>)/sqrt(2)`, whose
/// trace distance is `|kappa12|`; pair II is `(|01> +- |10>)/sqrt(2)`, with
/// trace distance `|Lambda12|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BellPair {
    I,
    II,
}

impl BellPair {
    pub const BOTH: [BellPair; 2] = [BellPair::I, BellPair::II];

    pub fn as_str(self) -> &'static str {
        match self {
            BellPair::I => "I",
            BellPair::II => "II",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "I" | "i" | "1" => Some(BellPair::I),
            "II" | "ii" | "2" => Some(BellPair::II),
            _ => None,
        }
    }
}

impl fmt::Display for BellPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ohmic spectral densities `J_j(w) = alpha_j w exp(-w / omega_c)` with a
/// shared cutoff, plus the qubit half-gaps `eps_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BathSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega_c: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for BathSpec {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            omega_c: 1.0,
            eps1: 0.0,
            eps2: 0.0,
        }
    }
}

impl BathSpec {
    pub fn new(alpha1: f64, alpha2: f64, omega_c: f64, eps1: f64, eps2: f64) -> Result<Self> {
        let bath = Self {
            alpha1,
            alpha2,
            omega_c,
            eps1,
            eps2,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Equal couplings, unit cutoff, degenerate qubits.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha, 1.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 > 0.0 && self.alpha1.is_finite()) {
            return Err(Error::InvalidBath("alpha1 must be > 0"));
        }
        if !(self.alpha2 > 0.0 && self.alpha2.is_finite()) {
            return Err(Error::InvalidBath("alpha2 must be > 0"));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidBath("omega_c must be > 0"));
        }
        if !(self.eps1.is_finite() && self.eps2.is_finite()) {
            return Err(Error::InvalidBath("qubit energies must be finite"));
        }
        Ok(())
    }

    pub fn alpha(&self, qubit: Qubit) -> f64 {
        match qubit {
            Qubit::First => self.alpha1,
            Qubit::Second => self.alpha2,
        }
    }

    pub fn eps(&self, qubit: Qubit) -> f64 {
        match qubit {
            Qubit::First => self.eps1,
            Qubit::Second => self.eps2,
        }
    }

    /// `sqrt(alpha1 alpha2)`
    pub fn mean_coupling(&self) -> f64 {
        sqrt(self.alpha1 * self.alpha2)
    }
}

/// Switch-on and switch-off times of the two local interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub t1_start: f64,
    pub t1_end: f64,
    pub t2_start: f64,
    pub t2_end: f64,
}

impl Schedule {
    pub fn new(t1_start: f64, t1_end: f64, t2_start: f64, t2_end: f64) -> Result<Self> {
        let s = Self {
            t1_start,
            t1_end,
            t2_start,
            t2_end,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.t1_start, self.t1_end, self.t2_start, self.t2_end];
        if !all.iter().all(|t| t.is_finite() && *t >= 0.0) {
            return Err(Error::InvalidSchedule(
                "switching times must be finite and >= 0",
            ));
        }
        if self.t1_start > self.t1_end {
            return Err(Error::InvalidSchedule("t1_start > t1_end"));
        }
        if self.t2_start > self.t2_end {
            return Err(Error::InvalidSchedule("t2_start > t2_end"));
        }
        if self.t1_start > self.t2_start {
            return Err(Error::InvalidSchedule("t1_start > t2_start"));
        }
        Ok(())
    }

    /// Back-to-back windows of equal length: `(0, dt, dt, 2 dt)`.
    pub fn consecutive(dt: f64) -> Result<Self> {
        Self::with_gap(dt, 0.0)
    }

    /// Equal windows separated by `gap`: `(0, dt, dt + gap, 2 dt + gap)`.
    pub fn with_gap(dt: f64, gap: f64) -> Result<Self> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::InvalidSchedule("window length must be > 0"));
        }
        Self::new(0.0, dt, dt + gap, 2.0 * dt + gap)
    }

    /// Both windows delayed by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(
            self.t1_start + offset,
            self.t1_end + offset,
            self.t2_start + offset,
            self.t2_end + offset,
        )
    }

    pub fn window(&self, qubit: Qubit) -> (f64, f64) {
        match qubit {
            Qubit::First => (self.t1_start, self.t1_end),
            Qubit::Second => (self.t2_start, self.t2_end),
        }
    }

    /// Time after which both interactions are off.
    pub fn end(&self) -> f64 {
        self.t1_end.max(self.t2_end)
    }

    /// Accumulated interaction time `t_j(t)`: the part of `[0, t]` that lies
    /// inside window `j`.
    pub fn interaction_time(&self, qubit: Qubit, t: f64) -> f64 {
        let (start, end) = self.window(qubit);
        (t - start).clamp(0.0, end - start)
    }
}

/// Amplitudes of the initial pure qubit state
/// `a00 |00> + a01 |01> + a10 |10> + a11 |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAmplitudes {
    pub a00: Complex64,
    pub a01: Complex64,
    pub a10: Complex64,
    pub a11: Complex64,
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl QubitAmplitudes {
    pub fn new(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> Result<Self> {
        let amps = Self { a00, a01, a10, a11 };
        let norm_sq = amps.norm_sq();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(amps)
    }

    /// `(|00> + sign |11>)/sqrt(2)` for pair I, `(|01> + sign |10>)/sqrt(2)` for pair II.
    pub fn bell(pair: BellPair, plus: bool) -> Self {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let s = if plus { h } else { -h };
        match pair {
            BellPair::I => Self {
                a00: h,
                a01: z,
                a10: z,
                a11: s,
            },
            BellPair::II => Self {
                a00: z,
                a01: h,
                a10: s,
                a11: z,
            },
        }
    }

    /// Amplitudes indexed by `2 m + n` for basis state `|mn>`.
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a00, self.a01, self.a10, self.a11]
    }

    pub fn norm_sq(&self) -> f64 {
        self.as_array().iter().map(|a| a.norm_sqr()).sum()
    }
}
