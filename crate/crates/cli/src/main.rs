use std::fs;
use std::io::Write;
use std::process::ExitCode;

use bjorth::Settings;
use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod input;
mod report;

use args::{Cli, Command};

/// Exit status for malformed invocations.
const USAGE: u8 = 64;

/// A one-line diagnostic for a malformed invocation.
#[derive(Debug)]
pub struct UsageError(pub String);

fn threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("BJORTH_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| UsageError(format!("BJORTH_THREADS: expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(format!("BJORTH_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<u8, UsageError> {
    threads()?;
    let c = &cli.config;
    let settings = Settings { eps: c.tol, band: c.band, resolution: c.resolution, ..Settings::default() };
    settings.validate().map_err(|e| UsageError(format!("configuration: {e}")))?;
    let report = match &cli.command {
        Command::CheckOrth { space, mode, operands, matrix, matrix2 } => commands::check_orth(
            space,
            *mode,
            operands.as_deref(),
            matrix.as_deref(),
            matrix2.as_deref(),
            settings,
        )?,
        Command::OperatorNorm { space, matrix } => commands::operator_norm_cmd(space, matrix, settings)?,
        Command::Verify { suite, p, n, trials } => commands::verify(*suite, *p, *n, *trials, c.seed, settings)?,
        Command::ScanSymmetric { space, kind } => commands::scan_symmetric(space, *kind, settings)?,
        Command::ConjectureSearch { n, p, trials } => commands::conjecture_search(*n, *p, *trials, c.seed, settings)?,
    };
    let json = serde_json::to_string_pretty(&report).expect("reports serialize");
    if let Some(path) = &c.out {
        fs::write(path, format!("{json}\n")).map_err(|e| UsageError(format!("--out: cannot write {}: {e}", path.display())))?;
    }
    let text = if c.json { format!("{json}\n") } else { report.render() };
    // A closed pipe (`| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    // The search is exploratory: its outcome never fails the invocation.
    Ok(match cli.command {
        Command::ConjectureSearch { .. } => 0,
        _ => report.exit_code(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
