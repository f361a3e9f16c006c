//! Second-order cumulant picture of the dephasing dynamics.
//!
//! Neglecting the bath free evolution during short interactions, each local
//! coupling acts as a fixed operator `A_j` and a coherence is the
//! characteristic function of `A_1 t_1 +- A_2 t_2`. For Gaussian states the
//! cumulant series stops at second order, which gives
//!
//! ```text
//! |kappa12| = exp(-4 alpha wc^2 (a t1^2 + b t2^2 + 2 c+ t1 t2))
//! |Lambda12| = exp(-4 alpha wc^2 (a t1^2 + b t2^2 - 2 c+ t1 t2))
//! ```
//!
//! and strong rephasing of pair II requires `1 - c+/a` to be small.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{quadrature_variance, Quadrature, TwoModeCovariance};
use crate::math::{exp, sqrt};
use crate::model::{BathSpec, BellPair, Qubit, Schedule};

pub const DEFAULT_REPHASING_THRESHOLD: f64 = 0.1;

/// Mean, variance and correlation coefficient of a coupling operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantSpec {
    pub mean: f64,
    pub variance: f64,
    pub correlation: f64,
}

impl CumulantSpec {
    pub fn new(mean: f64, variance: f64, correlation: f64) -> Result<Self> {
        if variance.is_nan() || variance < 0.0 {
            return Err(Error::InvalidArgument("variance must be >= 0"));
        }
        if correlation.is_nan() || correlation.abs() > 1.0 {
            return Err(Error::InvalidArgument("correlation must lie in [-1, 1]"));
        }
        Ok(Self {
            mean,
            variance,
            correlation,
        })
    }
}

/// `F(t) = exp(i <A> t - <<A^2>> t^2 / 2)`
pub fn cumulant_decoherence(spec: &CumulantSpec, t: f64) -> Result<Complex64> {
    if spec.variance.is_nan() || spec.variance < 0.0 {
        return Err(Error::InvalidArgument("variance must be >= 0"));
    }
    Ok(Complex64::from_polar(
        exp(-0.5 * spec.variance * t * t),
        spec.mean * t,
    ))
}

fn scaled(t: f64, schedule: &Schedule, omega_c: f64) -> (f64, f64) {
    (
        omega_c * schedule.interaction_time(Qubit::First, t),
        omega_c * schedule.interaction_time(Qubit::Second, t),
    )
}

/// `(|kappa12|, |Lambda12|)` for equal couplings `alpha`.
pub fn approx_coherences(
    t: f64,
    schedule: &Schedule,
    alpha: f64,
    omega_c: f64,
    s: &TwoModeCovariance,
) -> (f64, f64) {
    let (t1, t2) = scaled(t, schedule, omega_c);
    let local = s.a * t1 * t1 + s.b * t2 * t2;
    let cross = 2.0 * s.c_plus * t1 * t2;
    (
        exp(-4.0 * alpha * (local + cross)),
        exp(-4.0 * alpha * (local - cross)),
    )
}

/// [`approx_coherences`] for a bath; the couplings must be equal.
pub fn approx_nonlocal(
    t: f64,
    schedule: &Schedule,
    bath: &BathSpec,
    s: &TwoModeCovariance,
) -> Result<(f64, f64)> {
    bath.validate()?;
    if bath.alpha1 != bath.alpha2 {
        return Err(Error::UnequalCouplings);
    }
    Ok(approx_coherences(t, schedule, bath.alpha1, bath.omega_c, s))
}

/// Single-window decay `(|kappa1|, |kappa2|) = exp(-4 alpha_j wc^2 a t_j^2)`.
pub fn approx_local(
    t: f64,
    schedule: &Schedule,
    bath: &BathSpec,
    s: &TwoModeCovariance,
) -> (f64, f64) {
    let (t1, t2) = scaled(t, schedule, bath.omega_c);
    (
        exp(-4.0 * bath.alpha1 * s.a * t1 * t1),
        exp(-4.0 * bath.alpha2 * s.b * t2 * t2),
    )
}

/// Second moments of the two coupling operators as seen by a Bell pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCumulants {
    pub variance1: f64,
    pub variance2: f64,
    /// `<A1 A2>`, with the sign of the pair built in.
    pub covariance: f64,
}

impl CouplingCumulants {
    pub fn correlation(&self) -> f64 {
        self.covariance / sqrt(self.variance1 * self.variance2)
    }

    /// Cumulants of `A1 + A2`, the operator after two equal windows.
    pub fn combined(&self) -> CumulantSpec {
        let variance = self.variance1 + self.variance2 + 2.0 * self.covariance;
        CumulantSpec {
            mean: 0.0,
            variance: variance.max(0.0),
            correlation: self.correlation(),
        }
    }
}

/// `<<A_j^2>> = 8 alpha wc^2 a` and `<A1 A2> = +-8 alpha wc^2 c+`, with the
/// minus sign for pair II.
pub fn coupling_cumulants(
    s: &TwoModeCovariance,
    pair: BellPair,
    alpha: f64,
    omega_c: f64,
) -> CouplingCumulants {
    let scale = 8.0 * alpha * omega_c * omega_c;
    let sign = match pair {
        BellPair::I => 1.0,
        BellPair::II => -1.0,
    };
    CouplingCumulants {
        variance1: scale * s.a,
        variance2: scale * s.b,
        covariance: sign * scale * s.c_plus,
    }
}

/// `K_{A1 A2}`: `c+ / sqrt(a b)` for pair I and its negative for pair II.
pub fn coupling_correlation(s: &TwoModeCovariance, pair: BellPair) -> f64 {
    coupling_cumulants(s, pair, 1.0, 1.0).correlation()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RephasingCondition {
    pub value: f64,
    pub satisfied: bool,
}

/// `1 - c+/a` for pair II, `1 + c+/a` for pair I, compared with `threshold`.
pub fn rephasing_condition(
    s: &TwoModeCovariance,
    pair: BellPair,
    threshold: f64,
) -> RephasingCondition {
    let ratio = s.c_plus / s.a;
    let value = match pair {
        BellPair::I => 1.0 + ratio,
        BellPair::II => 1.0 - ratio,
    };
    RephasingCondition {
        value,
        satisfied: value < threshold,
    }
}

/// `(<(q1 +- q2)^2>, <q1^2>)`
pub fn variance_form(s: &TwoModeCovariance, which: Quadrature) -> (f64, f64) {
    (quadrature_variance(s, which), s.a)
}
