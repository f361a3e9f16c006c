use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use squeeze_probe::{commands, configure_threads, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(CliError::from(e).exit_code() as u8);
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("squeeze-probe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
