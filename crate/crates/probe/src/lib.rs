//! Command-line front end for `squeeze-probe-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Cli, Command, Opts};
pub use error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SQUEEZE_PROBE_THREADS";

/// Sizes the global thread pool from [`THREADS_VAR`].
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::config(format!(
                "{THREADS_VAR} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}
