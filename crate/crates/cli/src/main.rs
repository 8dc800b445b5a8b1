use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use plap_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            for l in &report.lines {
                // a closed pipe is not an error of the run
                if writeln!(out, "{l}").is_err() {
                    break;
                }
            }
            match report.status {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("plap: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("plap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
