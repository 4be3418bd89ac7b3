//! `siegert`: roots, expanding-domain trajectories and verification runs
//! for the square-well Siegert problem.
//!
//! Exit status: 0 when every check passes, 1 on a check violation or a
//! failed computation, 2 on usage or configuration errors.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{config_path, config_to_args, Cli, Command};
use commands::{CliError, Report};

const SUBCOMMANDS: &[&str] = &["roots", "expand", "verify"];

fn argv() -> Result<Vec<String>, String> {
    let mut raw: Vec<String> = std::env::args().collect();
    let Some(path) = config_path(&raw) else {
        return Ok(raw);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let extra = config_to_args(&text)?;
    if let Some(pos) = raw.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        raw.splice(pos + 1..pos + 1, extra);
    }
    Ok(raw)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Roots(a) => commands::roots(a),
        Command::Expand(a) => commands::expand(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let raw = match argv() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(raw);
    let common = match &cli.command {
        Command::Roots(a) => &a.common,
        Command::Expand(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = output::emit(&report.table.render(common.format), common.out.as_deref())
            {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            for n in &report.notes {
                eprintln!("{n}");
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("some checks failed");
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
