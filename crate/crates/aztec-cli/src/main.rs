mod commands;
mod config;
mod render;

use clap::error::ErrorKind;
use clap::Parser;
use config::{Cli, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return report(CliError::Config(e.to_string().trim().to_owned())),
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).expect("serializable"));
    ExitCode::from(e.code())
}
