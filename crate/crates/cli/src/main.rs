use std::process::ExitCode;

use clap::Parser;
use sonarknot_cli::cli::Cli;
use sonarknot_cli::commands;
use sonarknot_cli::exit::Status;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::configure_threads().and_then(|()| commands::run(cli)) {
        Ok(()) => Status::Ok.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.status.into()
        }
    }
}
