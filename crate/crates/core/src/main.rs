use std::process::ExitCode;

use clap::Parser;
use refstego::cli::{Cli, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("refstego: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
