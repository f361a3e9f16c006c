//! Brute-force coherence factors from an explicit mode sum.
//!
//! Each bath is replaced by a finite ladder of modes on a midpoint grid, both
//! baths sharing the same frequencies so that the `k`th modes form one
//! two-mode Gaussian state. Every overlap is then a product of per-mode
//! characteristic functions, accumulated as a compensated sum of exponents.
//! Unlike the closed forms this works for any switch-on time of the first
//! interaction.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coherence::{CoherenceSample, CoherenceTrace, Dynamics};
use crate::error::{Error, Result};
use crate::gaussian::{validate_physical, AngleConvention, GaussianStateSpec, TwoModeCovariance};
use crate::math::{exp, sin, sin_cos, sqrt, CompensatedSum};
use crate::model::{BathSpec, Qubit, Schedule};

pub const DEFAULT_MODES: usize = 20_000;
/// Upper end of the grid in units of the cutoff.
pub const DEFAULT_OMEGA_MAX: f64 = 40.0;

/// Discretized ohmic continuum with weights `g_k^2 = J_j(w_k) dw`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    bath: BathSpec,
    omegas: Vec<f64>,
    g1_sq: Vec<f64>,
    g2_sq: Vec<f64>,
    // g_k / w_k, the modulus scale of beta
    ratio1: Vec<f64>,
    ratio2: Vec<f64>,
}

impl ModeGrid {
    /// Midpoint grid of `n_modes` frequencies on `(0, omega_max * omega_c]`.
    pub fn build(bath: &BathSpec, n_modes: usize, omega_max: f64) -> Result<Self> {
        bath.validate()?;
        if n_modes < 2 {
            return Err(Error::InvalidModeGrid("need at least two modes"));
        }
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::InvalidModeGrid("omega_max must be > 0"));
        }
        let wc = bath.omega_c;
        let dw = omega_max * wc / n_modes as f64;
        let omegas: Vec<f64> = (0..n_modes).map(|k| (k as f64 + 0.5) * dw).collect();
        let weight = |alpha: f64| -> Vec<f64> {
            omegas
                .iter()
                .map(|&w| alpha * w * exp(-w / wc) * dw)
                .collect()
        };
        let g1_sq = weight(bath.alpha1);
        let g2_sq = weight(bath.alpha2);
        let ratio = |g_sq: &[f64]| -> Vec<f64> {
            g_sq.iter()
                .zip(&omegas)
                .map(|(g, w)| sqrt(*g) / w)
                .collect()
        };
        let ratio1 = ratio(&g1_sq);
        let ratio2 = ratio(&g2_sq);
        Ok(Self {
            bath: *bath,
            omegas,
            g1_sq,
            g2_sq,
            ratio1,
            ratio2,
        })
    }

    /// Grid with [`DEFAULT_MODES`] and [`DEFAULT_OMEGA_MAX`].
    pub fn with_defaults(bath: &BathSpec) -> Result<Self> {
        Self::build(bath, DEFAULT_MODES, DEFAULT_OMEGA_MAX)
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn g_sq(&self, qubit: Qubit) -> &[f64] {
        match qubit {
            Qubit::First => &self.g1_sq,
            Qubit::Second => &self.g2_sq,
        }
    }

    /// `sum_k g_k^2`, which tends to `alpha omega_c^2`.
    pub fn total_weight(&self, qubit: Qubit) -> f64 {
        let mut acc = CompensatedSum::default();
        for &g in self.g_sq(qubit) {
            acc.push(g);
        }
        acc.value()
    }

    fn ratio(&self, qubit: Qubit) -> &[f64] {
        match qubit {
            Qubit::First => &self.ratio1,
            Qubit::Second => &self.ratio2,
        }
    }
}

/// `beta_k^j(t) = (g_k / w_k) exp(i w_k t_j^s) (1 - exp(i w_k t_j(t)))`.
pub fn beta_coefficient(
    grid: &ModeGrid,
    qubit: Qubit,
    k: usize,
    t: f64,
    schedule: &Schedule,
) -> Complex64 {
    let (start, _) = schedule.window(qubit);
    let tau = schedule.interaction_time(qubit, t);
    beta(grid.ratio(qubit)[k], grid.omegas[k], start, tau)
}

// 1 - e^{ix} = -2i sin(x/2) e^{ix/2} keeps small arguments accurate
#[inline]
fn beta(ratio: f64, w: f64, start: f64, tau: f64) -> Complex64 {
    if tau == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let amp = -2.0 * ratio * sin(0.5 * w * tau);
    let (s, c) = sin_cos(w * (start + 0.5 * tau));
    // amp * i * e^{i theta}
    Complex64::new(-amp * s, amp * c)
}

/// Which overlap `<eta^{rs} | eta^{mn}>` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoherenceIndices {
    r: u8,
    s: u8,
    m: u8,
    n: u8,
}

impl CoherenceIndices {
    pub const KAPPA1: Self = Self {
        r: 0,
        s: 0,
        m: 1,
        n: 0,
    };
    pub const KAPPA2: Self = Self {
        r: 0,
        s: 0,
        m: 0,
        n: 1,
    };
    pub const KAPPA12: Self = Self {
        r: 0,
        s: 0,
        m: 1,
        n: 1,
    };
    pub const LAMBDA12: Self = Self {
        r: 0,
        s: 1,
        m: 1,
        n: 0,
    };

    pub fn new(r: u8, s: u8, m: u8, n: u8) -> Result<Self> {
        if [r, s, m, n].iter().any(|&i| i > 1) {
            return Err(Error::InvalidArgument("coherence indices must be 0 or 1"));
        }
        Ok(Self { r, s, m, n })
    }

    pub fn as_tuple(&self) -> (u8, u8, u8, u8) {
        (self.r, self.s, self.m, self.n)
    }

    /// `(-1)^a - (-1)^b` for the first and second qubit.
    fn weights(&self) -> (f64, f64) {
        let sign = |i: u8| if i == 0 { 1.0 } else { -1.0 };
        (sign(self.r) - sign(self.m), sign(self.s) - sign(self.n))
    }

    fn phase(&self, t: f64, bath: &BathSpec) -> f64 {
        let (w1, w2) = self.weights();
        // the qubit phase uses the opposite difference
        -t * (w1 * bath.eps1 + w2 * bath.eps2)
    }
}

/// One oracle query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoherenceRequest {
    pub indices: CoherenceIndices,
    pub t: f64,
    pub schedule: Schedule,
    pub state: GaussianStateSpec,
}

/// Per-time mode sums `sum a |beta1|^2`, `sum b |beta2|^2` and the cross term
/// `sum v1^T C v2` with `v_j = (Im beta_j, Re beta_j)`.
#[derive(Debug, Clone, Copy)]
struct ModeSums {
    local1: f64,
    local2: f64,
    cross: f64,
}

impl ModeSums {
    fn exponent(&self, w1: f64, w2: f64) -> f64 {
        w1 * w1 * self.local1 + w2 * w2 * self.local2 + 2.0 * w1 * w2 * self.cross
    }
}

fn mode_sums(grid: &ModeGrid, t: f64, schedule: &Schedule, m: &[[f64; 4]; 4]) -> ModeSums {
    let (s1, _) = schedule.window(Qubit::First);
    let (s2, _) = schedule.window(Qubit::Second);
    let tau1 = schedule.interaction_time(Qubit::First, t);
    let tau2 = schedule.interaction_time(Qubit::Second, t);
    let (a, b) = (m[0][0], m[2][2]);
    let (cqq, cqp, cpq, cpp) = (m[0][2], m[0][3], m[1][2], m[1][3]);
    let mut local1 = CompensatedSum::default();
    let mut local2 = CompensatedSum::default();
    let mut cross = CompensatedSum::default();
    for k in 0..grid.len() {
        let w = grid.omegas[k];
        let b1 = beta(grid.ratio1[k], w, s1, tau1);
        let b2 = beta(grid.ratio2[k], w, s2, tau2);
        local1.push(a * b1.norm_sqr());
        local2.push(b * b2.norm_sqr());
        let (x1, y1) = (b1.im, b1.re);
        let (x2, y2) = (b2.im, b2.re);
        cross.push(x1 * (cqq * x2 + cqp * y2) + y1 * (cpq * x2 + cpp * y2));
    }
    ModeSums {
        local1: local1.value(),
        local2: local2.value(),
        cross: cross.value(),
    }
}

fn coherence_from_sums(
    sums: &ModeSums,
    indices: CoherenceIndices,
    t: f64,
    bath: &BathSpec,
) -> Complex64 {
    let (w1, w2) = indices.weights();
    Complex64::from_polar(exp(-sums.exponent(w1, w2)), indices.phase(t, bath))
}

/// Evaluates one overlap on the grid.
pub fn oracle_coherence(request: &ModeCoherenceRequest, grid: &ModeGrid) -> Result<Complex64> {
    oracle_coherence_with(request, grid, AngleConvention::default())
}

pub fn oracle_coherence_with(
    request: &ModeCoherenceRequest,
    grid: &ModeGrid,
    convention: AngleConvention,
) -> Result<Complex64> {
    request.schedule.validate()?;
    let cov = request.state.covariance()?;
    let m = cov.characteristic_matrix_with(convention);
    let sums = mode_sums(grid, request.t, &request.schedule, &m);
    Ok(coherence_from_sums(
        &sums,
        request.indices,
        request.t,
        grid.bath(),
    ))
}

/// All four factors at once from a single pass over the modes.
pub fn oracle_sample(
    t: f64,
    schedule: &Schedule,
    cov: &TwoModeCovariance,
    grid: &ModeGrid,
    convention: AngleConvention,
) -> Result<CoherenceSample> {
    schedule.validate()?;
    if !validate_physical(cov) {
        return Err(Error::Unphysical);
    }
    Ok(sample_unchecked(
        t,
        schedule,
        &cov.characteristic_matrix_with(convention),
        grid,
    ))
}

fn sample_unchecked(
    t: f64,
    schedule: &Schedule,
    m: &[[f64; 4]; 4],
    grid: &ModeGrid,
) -> CoherenceSample {
    let sums = mode_sums(grid, t, schedule, m);
    let bath = grid.bath();
    CoherenceSample {
        t,
        kappa1: coherence_from_sums(&sums, CoherenceIndices::KAPPA1, t, bath),
        kappa2: coherence_from_sums(&sums, CoherenceIndices::KAPPA2, t, bath),
        kappa12: coherence_from_sums(&sums, CoherenceIndices::KAPPA12, t, bath),
        lambda12: coherence_from_sums(&sums, CoherenceIndices::LAMBDA12, t, bath),
    }
}

/// Oracle values on a time grid. Each time point is summed in a fixed order,
/// so the output does not depend on the number of threads.
pub fn oracle_trace(
    times: &[f64],
    schedule: &Schedule,
    cov: &TwoModeCovariance,
    grid: &ModeGrid,
    convention: AngleConvention,
) -> Result<CoherenceTrace> {
    schedule.validate()?;
    if !validate_physical(cov) {
        return Err(Error::Unphysical);
    }
    let m = cov.characteristic_matrix_with(convention);
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        let samples: Vec<CoherenceSample> = times
            .par_iter()
            .map(|&t| sample_unchecked(t, schedule, &m, grid))
            .collect();
        Ok(samples.into_iter().collect())
    }
    #[cfg(not(feature = "rayon"))]
    {
        Ok(times
            .iter()
            .map(|&t| sample_unchecked(t, schedule, &m, grid))
            .collect())
    }
}

/// Largest modulus deviation between oracle and closed form per factor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa12: f64,
    pub lambda12: f64,
    pub tolerance: f64,
}

impl ComparisonReport {
    pub fn max_deviation(&self) -> f64 {
        self.kappa1
            .max(self.kappa2)
            .max(self.kappa12)
            .max(self.lambda12)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

/// Compares `| |oracle| - |closed| |` on `times`. Needs `t1_start = 0`.
pub fn compare_with_closed_form(
    schedule: &Schedule,
    cov: &TwoModeCovariance,
    times: &[f64],
    grid: &ModeGrid,
    tolerance: f64,
) -> Result<ComparisonReport> {
    compare_with_closed_form_using(
        schedule,
        cov,
        times,
        grid,
        tolerance,
        AngleConvention::default(),
    )
}

pub fn compare_with_closed_form_using(
    schedule: &Schedule,
    cov: &TwoModeCovariance,
    times: &[f64],
    grid: &ModeGrid,
    tolerance: f64,
    convention: AngleConvention,
) -> Result<ComparisonReport> {
    let closed = Dynamics::new(*schedule, *grid.bath(), *cov)?.trace(times);
    let oracle = oracle_trace(times, schedule, cov, grid, convention)?;
    let dev = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p.norm() - q.norm()).abs())
            .fold(0.0, f64::max)
    };
    Ok(ComparisonReport {
        kappa1: dev(&oracle.kappa1, &closed.kappa1),
        kappa2: dev(&oracle.kappa2, &closed.kappa2),
        kappa12: dev(&oracle.kappa12, &closed.kappa12),
        lambda12: dev(&oracle.lambda12, &closed.lambda12),
        tolerance,
    })
}
