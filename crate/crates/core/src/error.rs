use core::fmt;

/// Everything that can go wrong in the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A mean photon number was negative (or not finite).
    NegativePhotonNumber(f64),
    /// The covariance violates the Robertson-Schroedinger condition.
    Unphysical,
    /// The operation needs a covariance with vanishing q-p cross terms.
    NotStandardForm,
    /// The operation needs a pure Gaussian state.
    MixedState { purity: f64 },
    /// Switching times are inconsistent.
    InvalidSchedule(&'static str),
    /// The closed forms are only valid when the first interaction starts at zero.
    NonzeroFirstStart(f64),
    /// Couplings or cutoff are not strictly positive.
    InvalidBath(&'static str),
    /// Initial amplitudes are not normalized.
    NotNormalized { norm_sq: f64 },
    /// The time grid is unsorted, too short or too coarse.
    InvalidTimeGrid(&'static str),
    /// Too few samples inside an interaction window.
    CoarseTimeGrid {
        qubit: u8,
        points: usize,
        required: usize,
    },
    /// Mode grid parameters out of range.
    InvalidModeGrid(&'static str),
    /// The approximate model requires equal couplings.
    UnequalCouplings,
    /// Not enough distinct interaction lengths to fit the requested parameters.
    TooFewDurations { distinct: usize, required: usize },
    /// A generic argument check failed.
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativePhotonNumber(n) => write!(f, "mean photon number must be >= 0, got {n}"),
            Error::Unphysical => {
                f.write_str("covariance matrix violates the Robertson-Schroedinger condition")
            }
            Error::NotStandardForm => {
                f.write_str("covariance matrix must be in standard form (c12 = c21 = 0)")
            }
            Error::MixedState { purity } => write!(f, "state is mixed (purity {purity})"),
            Error::InvalidSchedule(why) => write!(f, "invalid schedule: {why}"),
            Error::NonzeroFirstStart(t) => {
                write!(
                    f,
                    "closed forms need t1_start = 0 (got {t}); use the mode-sum oracle"
                )
            }
            Error::InvalidBath(why) => write!(f, "invalid bath: {why}"),
            Error::NotNormalized { norm_sq } => {
                write!(
                    f,
                    "qubit amplitudes are not normalized (sum of squares {norm_sq})"
                )
            }
            Error::InvalidTimeGrid(why) => write!(f, "invalid time grid: {why}"),
            Error::CoarseTimeGrid {
                qubit,
                points,
                required,
            } => write!(
                f,
                "time grid too coarse: {points} samples in window {qubit}, need at least {required}"
            ),
            Error::InvalidModeGrid(why) => write!(f, "invalid mode grid: {why}"),
            Error::UnequalCouplings => f.write_str("approximate dynamics need alpha1 = alpha2"),
            Error::TooFewDurations { distinct, required } => write!(
                f,
                "need measurements at {required} distinct durations, got {distinct}"
            ),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}
