//! Closed-form coherence factors for the ohmic continuum.
//!
//! With the first interaction switched on at `t = 0` the environment overlaps
//! reduce to
//!
//! ```text
//! kappa_1  = exp(-2i eps1 t) (1 + wc^2 t1^2)^(-4 a alpha1)
//! kappa_2  = exp(-2i eps2 t) (1 + wc^2 t2^2)^(-4 b alpha2)
//! kappa_12 = kappa_1 kappa_2 f g
//! Lambda_12 = kappa_1 conj(kappa_2) / (f g)
//! ```
//!
//! where `t_j = t_j(t)` is the accumulated interaction time, `f` collects
//! the `c+`/`c-` correlations and `g` the angle cross-covariances `c12`, `c21`.
//! Everything is accumulated as logarithms and exponentiated once.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{validate_physical, TwoModeCovariance};
use crate::linalg::hermitian_eigenvalues;
use crate::math::{arg, atan, exp, ln_1p_sq};
use crate::model::{BathSpec, BellPair, Qubit, QubitAmplitudes, Schedule};

/// Coherence factors at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSample {
    pub t: f64,
    pub kappa1: Complex64,
    pub kappa2: Complex64,
    pub kappa12: Complex64,
    pub lambda12: Complex64,
}

impl CoherenceSample {
    pub fn bell_distance(&self, pair: BellPair) -> f64 {
        match pair {
            BellPair::I => self.kappa12.norm(),
            BellPair::II => self.lambda12.norm(),
        }
    }
}

/// Coherence factors sampled on a time grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoherenceTrace {
    pub times: Vec<f64>,
    pub kappa1: Vec<Complex64>,
    pub kappa2: Vec<Complex64>,
    pub kappa12: Vec<Complex64>,
    pub lambda12: Vec<Complex64>,
}

impl CoherenceTrace {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            kappa1: Vec::with_capacity(n),
            kappa2: Vec::with_capacity(n),
            kappa12: Vec::with_capacity(n),
            lambda12: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, s: CoherenceSample) {
        self.times.push(s.t);
        self.kappa1.push(s.kappa1);
        self.kappa2.push(s.kappa2);
        self.kappa12.push(s.kappa12);
        self.lambda12.push(s.lambda12);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample(&self, i: usize) -> CoherenceSample {
        CoherenceSample {
            t: self.times[i],
            kappa1: self.kappa1[i],
            kappa2: self.kappa2[i],
            kappa12: self.kappa12[i],
            lambda12: self.lambda12[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = CoherenceSample> + '_ {
        (0..self.len()).map(move |i| self.sample(i))
    }

    /// `|kappa12|` or `|Lambda12|` along the trace.
    pub fn bell_distances(&self, pair: BellPair) -> Vec<f64> {
        let col = match pair {
            BellPair::I => &self.kappa12,
            BellPair::II => &self.lambda12,
        };
        col.iter().map(|z| z.norm()).collect()
    }
}

impl FromIterator<CoherenceSample> for CoherenceTrace {
    fn from_iter<I: IntoIterator<Item = CoherenceSample>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut trace = CoherenceTrace::with_capacity(iter.size_hint().0);
        for s in iter {
            trace.push(s);
        }
        trace
    }
}

/// Reduced two-qubit state, indexed by `2 m + n` for `|mn>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 4]; 4]);

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0)
    }
}

/// Closed-form dynamics for one schedule, bath and environment state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    schedule: Schedule,
    bath: BathSpec,
    cov: TwoModeCovariance,
}

impl Dynamics {
    /// Fails unless the first interaction starts at zero and the covariance
    /// is physical.
    pub fn new(schedule: Schedule, bath: BathSpec, cov: TwoModeCovariance) -> Result<Self> {
        schedule.validate()?;
        bath.validate()?;
        if schedule.t1_start != 0.0 {
            return Err(Error::NonzeroFirstStart(schedule.t1_start));
        }
        if !validate_physical(&cov) {
            return Err(Error::Unphysical);
        }
        Ok(Self {
            schedule,
            bath,
            cov,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn covariance(&self) -> &TwoModeCovariance {
        &self.cov
    }

    /// Interaction times scaled by the cutoff: `(wc t1(t), wc t2(t), wc t2_start)`.
    fn scaled_times(&self, t: f64) -> (f64, f64, f64) {
        let wc = self.bath.omega_c;
        (
            wc * self.schedule.interaction_time(Qubit::First, t),
            wc * self.schedule.interaction_time(Qubit::Second, t),
            wc * self.schedule.t2_start,
        )
    }

    /// `ln |kappa_j(t)|`
    pub fn ln_abs_kappa_local(&self, qubit: Qubit, t: f64) -> f64 {
        let (t1, t2, _) = self.scaled_times(t);
        match qubit {
            Qubit::First => -4.0 * self.cov.a * self.bath.alpha1 * ln_1p_sq(t1),
            Qubit::Second => -4.0 * self.cov.b * self.bath.alpha2 * ln_1p_sq(t2),
        }
    }

    pub fn kappa_local(&self, qubit: Qubit, t: f64) -> Complex64 {
        let phase = -2.0 * self.bath.eps(qubit) * t;
        Complex64::from_polar(exp(self.ln_abs_kappa_local(qubit, t)), phase)
    }

    /// `ln f(t)`, the contribution of `c+` and `c-`.
    pub fn ln_f(&self, t: f64) -> f64 {
        let (t1, t2, s) = self.scaled_times(t);
        let TwoModeCovariance {
            c_plus, c_minus, ..
        } = self.cov;
        let first = ln_1p_sq(s) + ln_1p_sq(t1 - t2 - s) - ln_1p_sq(t1 - s) - ln_1p_sq(t2 + s);
        let second =
            ln_1p_sq(t1 - s) + ln_1p_sq(t2 + s + t1) - ln_1p_sq(t1 + s) - ln_1p_sq(t2 + s - t1);
        self.bath.mean_coupling() * (4.0 * c_minus * first + 2.0 * (c_minus - c_plus) * second)
    }

    pub fn f_factor(&self, t: f64) -> f64 {
        exp(self.ln_f(t))
    }

    /// `ln g(t)`, the contribution of the cross-covariances `c12 = <q1 p2>`
    /// and `c21 = <p1 q2>`. Zero in standard form.
    ///
    /// Both terms come from Laplace transforms of `cos(x w) sin(y w) / w`,
    /// `sum_k arg[1 + x^2 + (-1)^k x y + i y]`. The `c21` term also carries
    /// the pure `sin(y w) / w` transform, `arctan(y)`.
    pub fn ln_g(&self, t: f64) -> f64 {
        let TwoModeCovariance { c12, c21, .. } = self.cov;
        if c12 == 0.0 && c21 == 0.0 {
            return 0.0;
        }
        let (t1, t2, s) = self.scaled_times(t);
        let u = t2 + s;
        let cos_sin = |x: f64, y: f64| arg(1.0 + x * x + x * y, y) + arg(1.0 + x * x - x * y, y);
        let q1p2 = c12 * (cos_sin(u, t1) - cos_sin(s, t1));
        let p1q2 = c21 * (2.0 * (atan(s) - atan(u)) - (cos_sin(t1, s) - cos_sin(t1, u)));
        4.0 * self.bath.mean_coupling() * (q1p2 + p1q2)
    }

    pub fn g_factor(&self, t: f64) -> f64 {
        exp(self.ln_g(t))
    }

    /// `(kappa12, Lambda12)`
    pub fn nonlocal(&self, t: f64) -> (Complex64, Complex64) {
        let base =
            self.ln_abs_kappa_local(Qubit::First, t) + self.ln_abs_kappa_local(Qubit::Second, t);
        let fg = self.ln_f(t) + self.ln_g(t);
        let (e1, e2) = (self.bath.eps1, self.bath.eps2);
        (
            Complex64::from_polar(exp(base + fg), -2.0 * (e1 + e2) * t),
            Complex64::from_polar(exp(base - fg), -2.0 * (e1 - e2) * t),
        )
    }

    /// `ln |kappa12|` (pair I) or `ln |Lambda12|` (pair II).
    pub fn ln_bell_distance(&self, t: f64, pair: BellPair) -> f64 {
        let base =
            self.ln_abs_kappa_local(Qubit::First, t) + self.ln_abs_kappa_local(Qubit::Second, t);
        let fg = self.ln_f(t) + self.ln_g(t);
        match pair {
            BellPair::I => base + fg,
            BellPair::II => base - fg,
        }
    }

    /// Trace distance of the orthogonal Bell pair, which is also the
    /// concurrence of either Bell state.
    pub fn bell_distance(&self, t: f64, pair: BellPair) -> f64 {
        exp(self.ln_bell_distance(t, pair))
    }

    pub fn sample(&self, t: f64) -> CoherenceSample {
        let (kappa12, lambda12) = self.nonlocal(t);
        CoherenceSample {
            t,
            kappa1: self.kappa_local(Qubit::First, t),
            kappa2: self.kappa_local(Qubit::Second, t),
            kappa12,
            lambda12,
        }
    }

    pub fn trace(&self, times: &[f64]) -> CoherenceTrace {
        #[cfg(feature = "rayon")]
        {
            use rayon::prelude::*;
            let samples: Vec<CoherenceSample> = times.par_iter().map(|&t| self.sample(t)).collect();
            samples.into_iter().collect()
        }
        #[cfg(not(feature = "rayon"))]
        {
            times.iter().map(|&t| self.sample(t)).collect()
        }
    }

    /// Reduced state at time `t` for the initial qubit state `amps`.
    pub fn reduced_density_matrix(&self, t: f64, amps: &QubitAmplitudes) -> Result<DensityMatrix> {
        let amps = QubitAmplitudes::new(amps.a00, amps.a01, amps.a10, amps.a11)?;
        Ok(assemble_density_matrix(&self.sample(t), &amps))
    }
}

/// Fills `rho[mn][rs] = a_mn conj(a_rs) C(mn, rs)` where `C` is 1 on the
/// diagonal and the appropriate coherence factor (or its conjugate) off it.
pub fn assemble_density_matrix(c: &CoherenceSample, amps: &QubitAmplitudes) -> DensityMatrix {
    let a = amps.as_array();
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (row, rho_row) in rho.iter_mut().enumerate() {
        for (col, entry) in rho_row.iter_mut().enumerate() {
            let (m, n) = (row >> 1, row & 1);
            let (r, s) = (col >> 1, col & 1);
            let factor = match (m == r, n == s) {
                (true, true) => Complex64::new(1.0, 0.0),
                (false, true) => conj_unless(c.kappa1, m == 1),
                (true, false) => conj_unless(c.kappa2, n == 1),
                (false, false) if m == n => conj_unless(c.kappa12, m == 1),
                (false, false) => conj_unless(c.lambda12, m == 1),
            };
            *entry = a[row] * a[col].conj() * factor;
        }
    }
    DensityMatrix(rho)
}

fn conj_unless(z: Complex64, keep: bool) -> Complex64 {
    if keep {
        z
    } else {
        z.conj()
    }
}

pub fn kappa_local(
    qubit: Qubit,
    t: f64,
    schedule: &Schedule,
    bath: &BathSpec,
    cov: &TwoModeCovariance,
) -> Result<Complex64> {
    Ok(Dynamics::new(*schedule, *bath, *cov)?.kappa_local(qubit, t))
}

pub fn nonlocal_coherences(
    t: f64,
    schedule: &Schedule,
    bath: &BathSpec,
    cov: &TwoModeCovariance,
) -> Result<(Complex64, Complex64)> {
    Ok(Dynamics::new(*schedule, *bath, *cov)?.nonlocal(t))
}

pub fn bell_distance(
    t: f64,
    pair: BellPair,
    schedule: &Schedule,
    bath: &BathSpec,
    cov: &TwoModeCovariance,
) -> Result<f64> {
    Ok(Dynamics::new(*schedule, *bath, *cov)?.bell_distance(t, pair))
}
