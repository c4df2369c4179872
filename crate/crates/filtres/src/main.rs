use std::process::ExitCode;

use clap::Parser;
use filtres::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("filtres: {e}");
            ExitCode::FAILURE
        }
    }
}
