use std::process::ExitCode;

use clap::Parser;
use orientcov_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = serde_json::json!({ "error": "usage", "message": e.to_string().trim() });
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli).and_then(|table| emit(&cli.global, &table)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
