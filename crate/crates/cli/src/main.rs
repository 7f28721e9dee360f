use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use dimgrid_cli::args::Cli;
use dimgrid_cli::{run, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CliError::Config(String::new()).exit_code() as u8),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dimgrid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
