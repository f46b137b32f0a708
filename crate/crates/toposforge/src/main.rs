use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use toposforge::cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.output.as_bytes());
            ExitCode::from(u8::from(outcome.failed))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
