use std::process::ExitCode;

use clap::Parser;
use planar_squeeze_cli::args::Cli;
use planar_squeeze_cli::{configure_threads, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
