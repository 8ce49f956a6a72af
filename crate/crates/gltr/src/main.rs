use std::process::ExitCode;

use clap::Parser;
use gltr_std::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(execute(cli, &mut std::io::stdout(), &mut std::io::stderr()))
}
