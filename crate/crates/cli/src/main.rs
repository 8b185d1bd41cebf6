//! `calogero`: command-line front end to the rational Calogero model library.
//!
//! Exit status: 0 on success, 1 when a verification or integration fails,
//! 2 on a usage error.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Invalid arguments or unusable input files.
    Usage(String),
    /// The command ran but its check or integration failed.
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(_) => 1,
        }
    }
}

impl From<calogero::Error> for Failure {
    fn from(e: calogero::Error) -> Self {
        use calogero::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::InvalidInput(_)
            | E::Singular { .. }
            | E::ChartSingularity(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests exit 0; everything else is a usage error.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Roots(a) => commands::roots(&a),
        Command::Geometry(a) => commands::geometry(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Run(m) => eprintln!("failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
