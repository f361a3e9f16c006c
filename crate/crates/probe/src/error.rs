use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unphysical state: {0}")]
    Unphysical(squeeze_probe_core::Error),
    #[error("{0}")]
    Core(squeeze_probe_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("strict mode: {0}")]
    Strict(String),
}

impl From<squeeze_probe_core::Error> for CliError {
    fn from(e: squeeze_probe_core::Error) -> Self {
        use squeeze_probe_core::Error as E;
        match e {
            E::Unphysical | E::NegativePhotonNumber(_) => CliError::Unphysical(e),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for unphysical states, 4 for strict-mode warnings, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unphysical(_) => 2,
            CliError::Strict(_) => 4,
            _ => 3,
        }
    }
}
