use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use safehorizon_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &report.out {
        Some(path) => std::fs::write(path, &report.body)
            .map_err(|e| format!("writing {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(report.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(exit_code(&report) as u8)
}
