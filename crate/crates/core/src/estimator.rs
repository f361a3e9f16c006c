//! Inverse problem: squeezing parameter (and angle) from rephasing data.
//!
//! The forward model is the Bell-pair backflow for consecutive equal
//! windows of each measured duration. The fit minimizes the RMS misfit over
//! a coarse scan followed by golden-section refinement, and every coarse
//! local minimum is reported so that ambiguous data are visible.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::coherence::Dynamics;
use crate::error::{Error, Result};
use crate::gaussian::{epr_covariance, mts_from_r, sts_covariance, TwoModeCovariance};
use crate::model::{BathSpec, BellPair, Schedule};
use crate::nonmarkov::{pair_measures, MeasureConfig, DEFAULT_MARGIN};
use crate::search::{argmin, golden_section_min, linspace, local_minima, rms};

/// Observed backflow after windows of length `delta_t`. Without a pair the
/// observation is the larger of the two Bell pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Measurement {
    pub delta_t: f64,
    pub observed: f64,
    pub pair: Option<BellPair>,
}

impl Measurement {
    pub fn new(delta_t: f64, observed: f64, pair: Option<BellPair>) -> Result<Self> {
        if !(delta_t > 0.0 && delta_t.is_finite()) {
            return Err(Error::InvalidArgument("delta_t must be > 0"));
        }
        if !(0.0..=1.0).contains(&observed) {
            return Err(Error::InvalidArgument("observed value must lie in [0, 1]"));
        }
        Ok(Self {
            delta_t,
            observed,
            pair,
        })
    }
}

/// One-parameter state family, indexed by the squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Epr,
    Mts,
    Sts { phi: f64, n1: f64, n2: f64 },
}

impl Family {
    pub fn covariance(&self, r: f64) -> Result<TwoModeCovariance> {
        match *self {
            Family::Epr => Ok(epr_covariance(r)),
            Family::Mts => Ok(mts_from_r(r)),
            Family::Sts { phi, n1, n2 } => sts_covariance(r, phi, n1, n2),
        }
    }

    fn with_phi(&self, phi: f64) -> Self {
        match *self {
            Family::Sts { n1, n2, .. } => Family::Sts { phi, n1, n2 },
            other => other,
        }
    }
}

fn model_value(
    bath: &BathSpec,
    cov: &TwoModeCovariance,
    delta_t: f64,
    pair: Option<BellPair>,
    config: &MeasureConfig,
) -> Result<f64> {
    let dynamics = Dynamics::new(Schedule::consecutive(delta_t)?, *bath, *cov)?;
    let [m1, m2] = pair_measures(&dynamics, config)?;
    Ok(match pair {
        Some(BellPair::I) => m1,
        Some(BellPair::II) => m2,
        None => m1.max(m2),
    })
}

/// Model backflow at each duration.
pub fn forward_curve(
    family: &Family,
    r: f64,
    bath: &BathSpec,
    delta_ts: &[f64],
    pair: Option<BellPair>,
    config: &MeasureConfig,
) -> Result<Vec<(f64, f64)>> {
    let cov = family.covariance(r)?;
    delta_ts
        .iter()
        .map(|&dt| Ok((dt, model_value(bath, &cov, dt, pair, config)?)))
        .collect()
}

/// Non-fatal findings of an estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum EstimationWarning {
    /// The coarse scan has several local minima.
    NonUnimodal { minima: usize },
    /// The best fit sits on the bracket edge.
    BracketEdge { edge: f64 },
    /// The residual exceeds the configured threshold.
    ModelMismatch { residual: f64, threshold: f64 },
    /// The data cannot resolve the requested parameter.
    InsufficientPrecision { flatness: f64, residual: f64 },
}

impl EstimationWarning {
    pub fn is_model_mismatch(&self) -> bool {
        matches!(self, EstimationWarning::ModelMismatch { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    pub r: f64,
    pub phi: Option<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimationResult {
    pub r_hat: f64,
    pub phi_hat: Option<f64>,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub warnings: Vec<EstimationWarning>,
    /// Refined coarse-scan minima, best first.
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub coarse_points: usize,
    /// Absolute tolerance on `r`.
    pub r_tol: f64,
    /// Absolute tolerance on `phi` in radians.
    pub phi_tol: f64,
    pub mismatch_threshold: f64,
    pub measure: MeasureConfig,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            coarse_points: 64,
            r_tol: 1e-5,
            phi_tol: 1e-4,
            mismatch_threshold: 0.02,
            measure: MeasureConfig {
                points_per_window: 256,
                margin: DEFAULT_MARGIN,
            },
        }
    }
}

/// Sorted copy so that results do not depend on input order.
fn canonical(measurements: &[Measurement]) -> Vec<Measurement> {
    let mut m = measurements.to_vec();
    m.sort_by(|x, y| {
        x.delta_t
            .total_cmp(&y.delta_t)
            .then(x.pair.cmp(&y.pair))
            .then(x.observed.total_cmp(&y.observed))
    });
    m
}

fn misfit(
    family: &Family,
    r: f64,
    bath: &BathSpec,
    data: &[Measurement],
    config: &MeasureConfig,
) -> Result<f64> {
    let cov = family.covariance(r)?;
    let mut residuals = Vec::with_capacity(data.len());
    for m in data {
        residuals.push(model_value(bath, &cov, m.delta_t, m.pair, config)? - m.observed);
    }
    Ok(rms(residuals))
}

fn check_bracket(bracket: (f64, f64)) -> Result<()> {
    let (lo, hi) = bracket;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument("bracket must satisfy lo < hi"));
    }
    Ok(())
}

/// Golden search on `f` that remembers the first error.
fn refine(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut failure = None;
    let m = golden_section_min(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((m.x, m.value)),
    }
}

fn fit_r(
    data: &[Measurement],
    family: &Family,
    bath: &BathSpec,
    bracket: (f64, f64),
    config: &EstimatorConfig,
) -> Result<EstimationResult> {
    let (lo, hi) = bracket;
    let n = config.coarse_points.max(3);
    let grid = linspace(lo, hi, n);
    let eval = |r: f64| misfit(family, r, bath, data, &config.measure);
    #[cfg(feature = "rayon")]
    let scan: Vec<f64> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&r| eval(r)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "rayon"))]
    let scan: Vec<f64> = grid.iter().map(|&r| eval(r)).collect::<Result<_>>()?;

    let minima = local_minima(&scan);
    let mut candidates = Vec::with_capacity(minima.len());
    for &i in &minima {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(n - 1)];
        let (r, residual) = refine(eval, a, b, config.r_tol)?;
        let (r, residual) = if residual <= scan[i] {
            (r, residual)
        } else {
            (grid[i], scan[i])
        };
        candidates.push(Candidate {
            r,
            phi: None,
            residual,
        });
    }
    candidates.sort_by(|x, y| x.residual.total_cmp(&y.residual).then(x.r.total_cmp(&y.r)));
    let best = candidates[0];

    let mut warnings = Vec::new();
    if minima.len() > 1 {
        warnings.push(EstimationWarning::NonUnimodal {
            minima: minima.len(),
        });
    }
    if best.r == lo || best.r == hi {
        warnings.push(EstimationWarning::BracketEdge { edge: best.r });
    }
    if best.residual > config.mismatch_threshold {
        warnings.push(EstimationWarning::ModelMismatch {
            residual: best.residual,
            threshold: config.mismatch_threshold,
        });
    }
    Ok(EstimationResult {
        r_hat: best.r,
        phi_hat: None,
        residual: best.residual,
        bracket,
        warnings,
        candidates,
    })
}

/// Fits `r` within `bracket` for a family with known angle and photon numbers.
pub fn estimate_r(
    measurements: &[Measurement],
    family: &Family,
    bath: &BathSpec,
    bracket: (f64, f64),
    config: &EstimatorConfig,
) -> Result<EstimationResult> {
    if measurements.is_empty() {
        return Err(Error::TooFewDurations {
            distinct: 0,
            required: 1,
        });
    }
    check_bracket(bracket)?;
    fit_r(&canonical(measurements), family, bath, bracket, config)
}

fn distinct_durations(data: &[Measurement]) -> usize {
    let mut n = 0;
    for (i, m) in data.iter().enumerate() {
        if i == 0 || m.delta_t != data[i - 1].delta_t {
            n += 1;
        }
    }
    n
}

/// Joint fit of squeezing parameter and angle for squeezed thermal states
/// with known photon numbers: a scan over `phi_grid`, an inner fit of `r`
/// at each angle, and golden-section refinement around the best angle.
pub fn estimate_r_phi(
    measurements: &[Measurement],
    n1: f64,
    n2: f64,
    bath: &BathSpec,
    r_bracket: (f64, f64),
    phi_grid: &[f64],
    config: &EstimatorConfig,
) -> Result<EstimationResult> {
    let data = canonical(measurements);
    let distinct = distinct_durations(&data);
    if distinct < 3 {
        return Err(Error::TooFewDurations {
            distinct,
            required: 3,
        });
    }
    check_bracket(r_bracket)?;
    if phi_grid.len() < 3 {
        return Err(Error::InvalidArgument(
            "phi grid needs at least three points",
        ));
    }
    let family = Family::Sts { phi: 0.0, n1, n2 };
    let inner = |phi: f64| fit_r(&data, &family.with_phi(phi), bath, r_bracket, config);
    let mut scan = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        scan.push(inner(phi)?);
    }
    let residuals: Vec<f64> = scan.iter().map(|s| s.residual).collect();
    let minima = local_minima(&residuals);

    let mut candidates = Vec::new();
    let mut refined = Vec::new();
    for &i in &minima {
        let a = phi_grid[i.saturating_sub(1)];
        let b = phi_grid[(i + 1).min(phi_grid.len() - 1)];
        let (phi, _) = refine(|phi| Ok(inner(phi)?.residual), a, b, config.phi_tol)?;
        let mut fit = inner(phi)?;
        if fit.residual > scan[i].residual {
            fit = scan[i].clone();
        }
        let phi = if fit.residual == scan[i].residual {
            phi_grid[i]
        } else {
            phi
        };
        candidates.push(Candidate {
            r: fit.r_hat,
            phi: Some(phi),
            residual: fit.residual,
        });
        refined.push((phi, fit));
    }
    let best_idx = argmin(&candidates.iter().map(|c| c.residual).collect::<Vec<_>>()).unwrap_or(0);
    let (phi_hat, best) = refined.swap_remove(best_idx);
    candidates.sort_by(|x, y| x.residual.total_cmp(&y.residual));

    let mut warnings = best.warnings.clone();
    if minima.len() > 1
        && !warnings
            .iter()
            .any(|w| matches!(w, EstimationWarning::NonUnimodal { .. }))
    {
        warnings.push(EstimationWarning::NonUnimodal {
            minima: minima.len(),
        });
    }
    Ok(EstimationResult {
        r_hat: best.r_hat,
        phi_hat: Some(phi_hat),
        residual: best.residual,
        bracket: r_bracket,
        warnings,
        candidates,
    })
}

/// Evenly spaced angles on `[0, 2 pi)`.
pub fn default_phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Misfit level below which photon-number splits are not resolved.
pub const PHOTON_NUMBER_SENSITIVITY: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhotonNumberEstimate {
    pub n1_hat: f64,
    pub n2_hat: f64,
    pub residual: f64,
    /// `(n1, misfit)` over the grid.
    pub misfit_curve: Vec<(f64, f64)>,
    /// Spread of the misfit curve, `max - min`.
    pub flatness: f64,
    pub warnings: Vec<EstimationWarning>,
}

/// Splits a known total photon number `n_sum` between the modes of a squeezed
/// thermal state with known `r` and `phi`, by grid search over `n1`.
pub fn distinguish_photon_numbers(
    measurements: &[Measurement],
    r: f64,
    phi: f64,
    n_sum: f64,
    bath: &BathSpec,
    grid_points: usize,
    config: &EstimatorConfig,
) -> Result<PhotonNumberEstimate> {
    if measurements.is_empty() {
        return Err(Error::TooFewDurations {
            distinct: 0,
            required: 1,
        });
    }
    if !(n_sum >= 0.0 && n_sum.is_finite()) {
        return Err(Error::NegativePhotonNumber(n_sum));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument(
            "photon-number grid needs at least two points",
        ));
    }
    let data = canonical(measurements);
    let grid = linspace(0.0, n_sum, grid_points);
    let eval = |n1: f64| {
        let family = Family::Sts {
            phi,
            n1,
            n2: (n_sum - n1).max(0.0),
        };
        misfit(&family, r, bath, &data, &config.measure)
    };
    #[cfg(feature = "rayon")]
    let values: Vec<f64> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&n1| eval(n1)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "rayon"))]
    let values: Vec<f64> = grid.iter().map(|&n1| eval(n1)).collect::<Result<_>>()?;

    let best = argmin(&values).unwrap_or(0);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let flatness = max - values[best];
    let residual = values[best];
    let mut warnings = Vec::new();
    if flatness < PHOTON_NUMBER_SENSITIVITY || residual >= PHOTON_NUMBER_SENSITIVITY {
        warnings.push(EstimationWarning::InsufficientPrecision { flatness, residual });
    }
    if residual > config.mismatch_threshold {
        warnings.push(EstimationWarning::ModelMismatch {
            residual,
            threshold: config.mismatch_threshold,
        });
    }
    let n1_hat = grid[best];
    Ok(PhotonNumberEstimate {
        n1_hat,
        n2_hat: n_sum - n1_hat,
        residual,
        misfit_curve: grid.into_iter().zip(values).collect(),
        flatness,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn synth(family: &Family, r: f64, dts: &[f64], pair: Option<BellPair>) -> Vec<Measurement> {
        let cfg = EstimatorConfig::default().measure;
        forward_curve(family, r, &BathSpec::default(), dts, pair, &cfg)
            .unwrap()
            .into_iter()
            .map(|(dt, v)| Measurement::new(dt, v, pair).unwrap())
            .collect()
    }

    const EPR3_DURATIONS: [f64; 5] = [0.034, 0.048, 0.068, 0.096, 0.135];

    #[test]
    fn forward_examples() {
        let cfg = EstimatorConfig::default().measure;
        let bath = BathSpec::default();
        let v = forward_curve(&Family::Epr, 5.0, &bath, &[0.025], None, &cfg).unwrap();
        assert!((v[0].1 - 0.8157).abs() < 1e-3);
        let v = forward_curve(&Family::Epr, 0.0, &bath, &[0.01, 0.1, 1.0], None, &cfg).unwrap();
        assert!(v.iter().all(|p| p.1 == 0.0));
        let v = forward_curve(&Family::Mts, 4.0, &bath, &[0.025], None, &cfg).unwrap();
        assert!((v[0].1 - 0.8353).abs() < 1e-3);
    }

    #[test]
    fn round_trip_epr() {
        let data = synth(&Family::Epr, 3.0, &EPR3_DURATIONS, None);
        let res = estimate_r(
            &data,
            &Family::Epr,
            &BathSpec::default(),
            (0.0, 6.0),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!((res.r_hat - 3.0).abs() < 5e-3, "{res:?}");
        assert!(res.warnings.is_empty(), "{res:?}");
    }

    #[test]
    fn order_does_not_matter() {
        let mut data = synth(&Family::Mts, 2.0, &[0.08, 0.12, 0.17, 0.24, 0.33], None);
        let cfg = EstimatorConfig::default();
        let a = estimate_r(&data, &Family::Mts, &BathSpec::default(), (0.0, 6.0), &cfg).unwrap();
        data.reverse();
        data.swap(1, 3);
        let b = estimate_r(&data, &Family::Mts, &BathSpec::default(), (0.0, 6.0), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clamped_to_bracket() {
        let data = synth(&Family::Epr, 5.0, &[0.007, 0.01, 0.0145, 0.02, 0.029], None);
        let res = estimate_r(
            &data,
            &Family::Epr,
            &BathSpec::default(),
            (0.0, 2.0),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert_eq!(res.r_hat, 2.0);
        assert!(res
            .warnings
            .iter()
            .any(|w| matches!(w, EstimationWarning::BracketEdge { edge } if *edge == 2.0)));
        assert!(res
            .warnings
            .iter()
            .any(EstimationWarning::is_model_mismatch));
    }

    #[test]
    fn joint_round_trip() {
        let family = Family::Sts {
            phi: FRAC_PI_4,
            n1: 0.0,
            n2: 0.0,
        };
        let data = synth(&family, 3.0, &EPR3_DURATIONS, Some(BellPair::II));
        let res = estimate_r_phi(
            &data,
            0.0,
            0.0,
            &BathSpec::default(),
            (0.0, 6.0),
            &default_phi_grid(32),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!((res.r_hat - 3.0).abs() < 0.01, "{res:?}");
        assert!((res.phi_hat.unwrap() - FRAC_PI_4).abs() < 0.02, "{res:?}");
    }

    #[test]
    fn angle_pi_is_a_second_candidate_without_pair_labels() {
        let family = Family::Sts {
            phi: 0.0,
            n1: 0.0,
            n2: 0.0,
        };
        let data = synth(&family, 2.0, &[0.065, 0.09, 0.13, 0.18, 0.26], None);
        let res = estimate_r_phi(
            &data,
            0.0,
            0.0,
            &BathSpec::default(),
            (0.0, 4.0),
            &default_phi_grid(16),
            &EstimatorConfig::default(),
        )
        .unwrap();
        let near = |target: f64| {
            res.candidates
                .iter()
                .any(|c| (c.phi.unwrap() - target).abs() < 0.05 && c.residual < 1e-6)
        };
        assert!(near(0.0) && near(PI), "{:?}", res.candidates);
    }

    #[test]
    fn angle_fit_needs_three_durations() {
        let data = synth(&Family::Epr, 1.0, &[0.1, 0.2], None);
        let err = estimate_r_phi(
            &data,
            0.0,
            0.0,
            &BathSpec::default(),
            (0.0, 2.0),
            &default_phi_grid(8),
            &EstimatorConfig::default(),
        );
        assert_eq!(
            err,
            Err(Error::TooFewDurations {
                distinct: 2,
                required: 3
            })
        );
        assert!(Measurement::new(0.1, 1.5, None).is_err());
        assert!(Measurement::new(0.0, 0.5, None).is_err());
    }

    #[test]
    fn photon_number_split() {
        let dts = [0.05, 0.08, 0.1, 0.13, 0.16];
        let data = synth(
            &Family::Sts {
                phi: 0.0,
                n1: 1.0,
                n2: 3.0,
            },
            2.0,
            &dts,
            None,
        );
        let est = distinguish_photon_numbers(
            &data,
            2.0,
            0.0,
            4.0,
            &BathSpec::default(),
            17,
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!((est.n1_hat - 1.0).abs() <= 0.25, "{est:?}");
        assert!(est.warnings.is_empty(), "{est:?}");

        let even = synth(
            &Family::Sts {
                phi: 0.0,
                n1: 2.0,
                n2: 2.0,
            },
            2.0,
            &dts,
            None,
        );
        let est = distinguish_photon_numbers(
            &even,
            2.0,
            0.0,
            4.0,
            &BathSpec::default(),
            17,
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert_eq!(est.n1_hat, 2.0);
    }
}
