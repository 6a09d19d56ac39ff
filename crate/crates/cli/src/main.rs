//! `confcalc` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! usage or input errors.

mod cli;
mod run;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use run::{Context, Failure, Outcome};

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CONFCALC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("CONFCALC_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let ctx = Context {
        global: &cli.global,
        spec: run::spec_from(&cli.global)?,
    };
    match &cli.command {
        Command::Deriv(a) => run::deriv(&ctx, a),
        Command::Check(c) => run::check(&ctx, c),
        Command::Hardy(a) => run::hardy(&ctx, a),
        Command::Constant(a) => run::constant(&ctx, a),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), String> {
    let json = confcalc::report::to_json(&outcome.report).map_err(|e| e.to_string())?;
    match &cli.global.out {
        Some(path) => {
            let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            let body = if is_csv { &outcome.csv } else { &json };
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            println!("{}", outcome.summary);
        }
        None if matches!(cli.command, Command::Deriv(_)) => println!("{}", outcome.summary),
        None => print!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome) {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE);
            }
            if outcome.pass {
                ExitCode::from(PASS)
            } else {
                eprintln!("verification failed: {}", outcome.summary);
                ExitCode::from(FAIL)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(FAIL)
        }
    }
}
