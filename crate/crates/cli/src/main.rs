#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes: 0 ok, 2 input error, 3 size cap exceeded, 4 numeric failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    use nudgem::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<nudgem::Error>() {
            return match e {
                E::Complexity { .. } => 3,
                E::Numeric(_) | E::Solver { .. } | E::UnsupportedSpectrum(_) | E::DecayRateExceeded { .. } | E::Estimation(_) => 4,
                E::InvalidDistribution(_) | E::Fit(_) | E::Dimension(_) | E::Instability { .. } | E::Input(_) | E::Query(_) => 2,
            };
        }
        if cause.downcast_ref::<commands::ChecksFailed>().is_some() {
            return 4;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Atir(a) => commands::atir(&a),
        Command::Dist(a) => commands::dist(&a),
        Command::Mean(a) => commands::mean(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Recipes => commands::recipes(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
