use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nonarch_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &out.output).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(out.output.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(out.code as u8)
}
