use std::process::ExitCode;

use clap::Parser;
use sgdg_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = serde_json::json!({ "error": "usage", "message": e.to_string().trim_end() });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let err = serde_json::json!({ "error": e.category(), "message": e.to_string() });
            eprintln!("{err}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
