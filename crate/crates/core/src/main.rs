use std::process::ExitCode;

use clap::Parser;
use meteor_e::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match RunConfig::from_cli(cli).and_then(|config| run(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("meteor-e: error: {e}");
            ExitCode::FAILURE
        }
    }
}
