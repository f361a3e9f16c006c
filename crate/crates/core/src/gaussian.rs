//! Zero-mean two-mode Gaussian environment states, described entirely by
//! their 4x4 covariance matrix.
//!
//! Quadratures are `q = (b + b^dag)/sqrt(2)`, `p = -i (b - b^dag)/sqrt(2)`,
//! so the vacuum has variance 1/2. Matrices are ordered `(q1, p1, q2, p2)`.
//!
//! Hyperbolic entries overflow near `r = 355`; the supported range is
//! `|r| <= 300`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::math::{cos, cosh, exp, sin, sinh, sqrt};

/// Variance of either quadrature in the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Relative slack on the smallest eigenvalue of `S + (i/2) Omega`.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-10;

/// Base tolerance for treating a state as pure.
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// Covariance matrix of a zero-mean two-mode Gaussian state,
///
/// ```text
///     | a    0    c+   c12 |
///     | 0    a    c21  c-  |
///     | c+   c21  b    0   |
///     | c12  c-   0    b   |
/// ```
///
/// in the ordering `(q1, p1, q2, p2)`. `c12 = <q1 p2>` and `c21 = <p1 q2>`
/// vanish in standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoModeCovariance {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub c12: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub c21: f64,
}

/// How the angle cross-covariances enter the characteristic function.
///
/// The characteristic function uses the covariance of `(q1, -p1, q2, -p2)`,
/// which flips the sign of `c12` and `c21` (equivalently of the squeezing
/// angle). `Direct` skips that flip and exists only to show that it matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleConvention {
    #[default]
    Conjugated,
    Direct,
}

impl TwoModeCovariance {
    pub const VACUUM: Self = Self::standard_form(VACUUM_VARIANCE, VACUUM_VARIANCE, 0.0, 0.0);

    pub const fn new(a: f64, b: f64, c_plus: f64, c_minus: f64, c12: f64, c21: f64) -> Self {
        Self {
            a,
            b,
            c_plus,
            c_minus,
            c12,
            c21,
        }
    }

    pub const fn standard_form(a: f64, b: f64, c_plus: f64, c_minus: f64) -> Self {
        Self::new(a, b, c_plus, c_minus, 0.0, 0.0)
    }

    pub fn is_standard_form(&self) -> bool {
        self.c12 == 0.0 && self.c21 == 0.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.b
    }

    /// The full matrix in `(q1, p1, q2, p2)` ordering.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let Self {
            a,
            b,
            c_plus,
            c_minus,
            c12,
            c21,
        } = *self;
        [
            [a, 0.0, c_plus, c12],
            [0.0, a, c21, c_minus],
            [c_plus, c21, b, 0.0],
            [c12, c_minus, 0.0, b],
        ]
    }

    /// Matrix entering `exp(-l^T S l)` with `l = (Im g1, Re g1, Im g2, Re g2)`.
    pub fn characteristic_matrix(&self) -> [[f64; 4]; 4] {
        self.characteristic_matrix_with(AngleConvention::default())
    }

    pub fn characteristic_matrix_with(&self, convention: AngleConvention) -> [[f64; 4]; 4] {
        match convention {
            AngleConvention::Conjugated => Self {
                c12: -self.c12,
                c21: -self.c21,
                ..*self
            }
            .matrix(),
            AngleConvention::Direct => self.matrix(),
        }
    }

    /// Mirror of the second mode's momentum, `p2 -> -p2`.
    pub fn partial_transpose(&self) -> Self {
        Self {
            c_minus: -self.c_minus,
            c12: -self.c12,
            ..*self
        }
    }

    /// `det S = det(a b I - C^T C)` with `C` the off-diagonal block, which
    /// keeps the cancellation of strongly squeezed states to second order.
    pub fn determinant(&self) -> f64 {
        let Self {
            a,
            b,
            c_plus,
            c_minus,
            c12,
            c21,
        } = *self;
        let g = sqrt(a * b);
        let m00 = (g - c_plus) * (g + c_plus) - c21 * c21;
        let m11 = (g - c_minus) * (g + c_minus) - c12 * c12;
        let m01 = c_plus * c12 + c21 * c_minus;
        m00 * m11 - m01 * m01
    }

    fn max_abs_entry(&self) -> f64 {
        [
            self.a,
            self.b,
            self.c_plus,
            self.c_minus,
            self.c12,
            self.c21,
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    fn is_finite(&self) -> bool {
        [
            self.a,
            self.b,
            self.c_plus,
            self.c_minus,
            self.c12,
            self.c21,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Smallest eigenvalue of the Hermitian matrix `S + (i/2) Omega`.
pub fn uncertainty_min_eigenvalue(s: &TwoModeCovariance) -> f64 {
    let m = s.matrix();
    let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = Complex64::new(m[i][j], 0.0);
        }
    }
    // Omega = diag(w, w), w = [[0, 1], [-1, 0]]
    for k in [0, 2] {
        h[k][k + 1].im += 0.5;
        h[k + 1][k].im -= 0.5;
    }
    hermitian_eigenvalues(&h)[0]
}

/// Robertson-Schroedinger test `S + (i/2) Omega >= 0`. NaN or infinite
/// entries are unphysical.
pub fn validate_physical(s: &TwoModeCovariance) -> bool {
    if !s.is_finite() {
        return false;
    }
    let tol = PHYSICALITY_TOLERANCE * s.max_abs_entry().max(1.0);
    uncertainty_min_eigenvalue(s) >= -tol
}

fn require_physical(s: &TwoModeCovariance) -> Result<()> {
    if validate_physical(s) {
        Ok(())
    } else {
        Err(Error::Unphysical)
    }
}

fn check_photon_number(n: f64) -> Result<()> {
    if n >= 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativePhotonNumber(n))
    }
}

/// Two-mode squeezed thermal state with squeezing `r`, angle `phi` and
/// thermal photon numbers `n1`, `n2` before squeezing.
pub fn sts_covariance(r: f64, phi: f64, n1: f64, n2: f64) -> Result<TwoModeCovariance> {
    check_photon_number(n1)?;
    check_photon_number(n2)?;
    let (ch, sh) = (cosh(r), sinh(r));
    let half_ch2 = 0.5 * cosh(2.0 * r);
    let a = half_ch2 + n1 * ch * ch + n2 * sh * sh;
    let b = half_ch2 + n2 * ch * ch + n1 * sh * sh;
    let c = 0.5 * (1.0 + n1 + n2) * sinh(2.0 * r);
    // angle zero and pi must give exact zeros off the standard form
    let (sin_phi, cos_phi) = if phi == 0.0 {
        (0.0, 1.0)
    } else {
        (sin(phi), cos(phi))
    };
    let c_plus = c * cos_phi;
    Ok(TwoModeCovariance::new(
        a,
        b,
        c_plus,
        -c_plus,
        c * sin_phi,
        c * sin_phi,
    ))
}

/// Two-mode squeezed vacuum (twin beam).
pub fn epr_covariance(r: f64) -> TwoModeCovariance {
    let a = 0.5 * cosh(2.0 * r);
    let c = 0.5 * sinh(2.0 * r);
    TwoModeCovariance::standard_form(a, a, c, -c)
}

/// Thermal modes with photon numbers `n1`, `n2` mixed on a balanced beam splitter.
pub fn mts_covariance(n1: f64, n2: f64) -> Result<TwoModeCovariance> {
    check_photon_number(n1)?;
    check_photon_number(n2)?;
    let a = 0.5 * (n1 + n2 + 1.0);
    let c = 0.5 * (n2 - n1);
    Ok(TwoModeCovariance::standard_form(a, a, c, c))
}

/// Mixed thermal state with vacuum in the first port and
/// `n2 = cosh(2r) - 1` in the second.
pub fn mts_from_r(r: f64) -> TwoModeCovariance {
    let x = cosh(2.0 * r);
    let a = 0.5 * x;
    let c = 0.5 * (x - 1.0);
    TwoModeCovariance::standard_form(a, a, c, c)
}

/// PPT test: separable iff the partially transposed matrix still satisfies
/// the uncertainty relation. Handles arbitrary (non standard form) input.
pub fn is_separable(s: &TwoModeCovariance) -> Result<bool> {
    require_physical(s)?;
    Ok(validate_physical(&s.partial_transpose()))
}

/// `Tr(rho^2) = 1 / (4 sqrt(det S))`.
pub fn purity(s: &TwoModeCovariance) -> Result<f64> {
    require_physical(s)?;
    Ok(1.0 / (4.0 * sqrt(s.determinant())))
}

/// Slack allowed on `purity == 1`. Rounding the entries of a strongly
/// squeezed pure state perturbs `det S` by about `eps * max|S|^2`.
pub fn purity_tolerance(s: &TwoModeCovariance) -> f64 {
    let m = s.max_abs_entry();
    PURITY_TOLERANCE + 64.0 * f64::EPSILON * m * m
}

/// `K = <q1 q2> / sqrt(<q1^2> <q2^2>) = c+ / sqrt(a b)`.
pub fn position_correlation(s: &TwoModeCovariance) -> f64 {
    s.c_plus / sqrt(s.a * s.b)
}

/// Generalized concurrence of a pure two-mode Gaussian state,
/// `C = sqrt(1 - sqrt(1 - K^2))`.
pub fn pure_concurrence(s: &TwoModeCovariance) -> Result<f64> {
    let p = purity(s)?;
    if (p - 1.0).abs() > purity_tolerance(s) {
        return Err(Error::MixedState { purity: p });
    }
    let k = position_correlation(s).clamp(-1.0, 1.0);
    let one_minus_k2 = (1.0 - k.abs()) * (1.0 + k.abs());
    Ok(sqrt(1.0 - sqrt(one_minus_k2)))
}

/// Sum or difference of the two position quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// `q1 + q2`
    Sum,
    /// `q1 - q2`
    Difference,
}

/// `<(q1 +- q2)^2> = a + b +- 2 c+` for a zero-mean state.
pub fn quadrature_variance(s: &TwoModeCovariance, which: Quadrature) -> f64 {
    match which {
        Quadrature::Sum => (s.a + s.b) + 2.0 * s.c_plus,
        Quadrature::Difference => (s.a + s.b) - 2.0 * s.c_plus,
    }
}

/// Characteristic function `exp(-l^T S l)` of the zero-mean state, with
/// `l = (Im g1, Re g1, Im g2, Re g2)`.
pub fn characteristic_value(s: &TwoModeCovariance, lambda: [f64; 4]) -> Result<f64> {
    require_physical(s)?;
    Ok(exp(-quadratic_form(&s.characteristic_matrix(), &lambda)))
}

pub(crate) fn quadratic_form(m: &[[f64; 4]; 4], v: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut row = 0.0;
        for j in 0..4 {
            row += m[i][j] * v[j];
        }
        acc += v[i] * row;
    }
    acc
}

/// Family of a [`GaussianStateSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum StateKind {
    Sts,
    Epr,
    Mts,
    Custom,
}

/// Parametrized description of an environment state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianStateSpec {
    /// Squeezed thermal state.
    Sts { r: f64, phi: f64, n1: f64, n2: f64 },
    /// Two-mode squeezed vacuum.
    Epr { r: f64 },
    /// Balanced beam-splitter mixture of two thermal modes.
    Mts { n1: f64, n2: f64 },
    /// User-supplied covariance.
    Custom(TwoModeCovariance),
}

impl GaussianStateSpec {
    /// The mixed thermal state in its one-parameter form.
    pub fn mts_from_r(r: f64) -> Self {
        GaussianStateSpec::Mts {
            n1: 0.0,
            n2: cosh(2.0 * r) - 1.0,
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            GaussianStateSpec::Sts { .. } => StateKind::Sts,
            GaussianStateSpec::Epr { .. } => StateKind::Epr,
            GaussianStateSpec::Mts { .. } => StateKind::Mts,
            GaussianStateSpec::Custom(_) => StateKind::Custom,
        }
    }

    /// Builds and validates the covariance.
    pub fn covariance(&self) -> Result<TwoModeCovariance> {
        let s = match *self {
            GaussianStateSpec::Sts { r, phi, n1, n2 } => sts_covariance(r, phi, n1, n2)?,
            GaussianStateSpec::Epr { r } => epr_covariance(r),
            GaussianStateSpec::Mts { n1, n2 } => mts_covariance(n1, n2)?,
            GaussianStateSpec::Custom(s) => s,
        };
        require_physical(&s)?;
        Ok(s)
    }
}
