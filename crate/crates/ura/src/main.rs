use clap::error::ErrorKind;
use clap::Parser;

use ura::cli::{self, Cli};
use ura::UraError;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => cli::EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                UraError::Config(_) | UraError::Domain(_) | UraError::InvalidSize(_) => {
                    cli::EXIT_VALIDATION
                }
                _ => cli::EXIT_VALIDATION,
            };
            std::process::exit(code);
        }
    }
}
