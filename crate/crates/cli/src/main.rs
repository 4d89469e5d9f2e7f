//! `divmetric`: command-line front end for `divmetric-core`.
//!
//! | Exit code | Meaning |
//! |-----------|---------|
//! | 0 | success, or the verification suite passed |
//! | 1 | verification suite failed |
//! | 2 | usage or configuration error |
//! | 3 | input data error (I/O, parse, validation, index schema) |

mod args;
mod commands;
mod error;
mod input;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use error::exit;
use report::RunReport;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    let started = cli.timing.then(Instant::now);
    let outcome = match &cli.command {
        Command::Compute(a) => commands::compute::run(a),
        Command::Verify(suite) => commands::verify::run(suite),
        Command::Index(action) => commands::index::run(action),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let passed = outcome.passed;
    let report = RunReport::new(outcome, std::env::args().skip(1).collect(), started);
    if let Err(e) = report.emit(cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    ExitCode::from(if passed {
        exit::OK
    } else {
        exit::VERIFICATION_FAILED
    })
}
