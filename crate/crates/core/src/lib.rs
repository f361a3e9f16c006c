//! Exact pure-dephasing dynamics of two qubits coupled locally to a bath of
//! correlated two-mode Gaussian field modes.
//!
//! The crate covers the full forward model and its inversion:
//!
//! * [`gaussian`]: two-mode covariance matrices (squeezed thermal, twin-beam,
//!   beam-splitter mixed thermal, custom), physicality, PPT separability,
//!   purity and quadrature statistics.
//! * [`coherence`]: closed-form coherence factors for an ohmic continuum with
//!   independently switched local interactions, and the reduced two-qubit state.
//! * [`oracle`]: brute-force evaluation of the same factors by summing over a
//!   discretized mode continuum.
//! * [`nonmarkov`]: trace-distance non-Markovianity over Bell-state pairs and
//!   the interaction length that maximizes it.
//! * [`estimator`]: recovery of the squeezing parameter (and angle) from
//!   rephasing data.
//! * [`approx`]: the dynamics without free evolution and the cumulant
//!   rephasing condition.
//!
//! Time is measured in units of the inverse cutoff frequency throughout.
//!
//! The crate is `no_std` (with `alloc`) when built without the `std` feature.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod approx;
pub mod coherence;
pub mod error;
pub mod estimator;
pub mod gaussian;
pub mod linalg;
pub mod model;
pub mod nonmarkov;
pub mod oracle;
pub mod search;

mod math;

pub use num_complex::Complex64;

pub use coherence::{CoherenceSample, CoherenceTrace, DensityMatrix, Dynamics};
pub use error::{Error, Result};
pub use gaussian::{AngleConvention, GaussianStateSpec, StateKind, TwoModeCovariance};
pub use model::{BathSpec, BellPair, Qubit, QubitAmplitudes, Schedule};
pub use nonmarkov::{NonMarkovResult, SweepPoint, TimeGrid};
