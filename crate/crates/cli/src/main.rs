mod args;
mod commands;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, Outcome};

fn dispatch(cli: &Cli) -> (Result<Outcome, CliError>, Option<&std::path::Path>) {
    match &cli.command {
        Command::Classify(a) => (commands::classify_cmd(a), a.output.out.as_deref()),
        Command::Spectrum(a) => (commands::spectrum_cmd(a), a.output.out.as_deref()),
        Command::Sweep(a) => (commands::sweep_cmd(a), a.output.out.as_deref()),
        Command::Verify(a) => (commands::verify_cmd(a), a.out.as_deref()),
        Command::Report(a) => (commands::report_cmd(a), a.out.as_deref()),
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("--out {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // Keep the reason and the flag it names; drop the usage block.
            let msg = e.to_string();
            let head: Vec<&str> = msg.lines().take_while(|l| !l.trim().is_empty()).map(str::trim).collect();
            eprintln!("{}", head.join(" "));
            return ExitCode::from(1);
        }
    };

    let (res, out) = dispatch(&cli);
    let outcome = match res {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(&outcome.text, out) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for f in &outcome.failures {
        eprintln!("error: {f}");
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
