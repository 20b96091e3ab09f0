//! `swarm-anneal`: run, sample, validate and aggregate experiments.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    let result = match cli.command {
        args::Command::Run(a) => commands::run(a),
        args::Command::InitSample(a) => commands::init_sample(a),
        args::Command::Validate(a) => commands::validate(a),
        args::Command::Aggregate(a) => commands::aggregate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
