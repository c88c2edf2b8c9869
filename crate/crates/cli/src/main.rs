//! `lrcov` command-line front end.

mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;
use lrcov::{ErrorClass, LrcError};

use args::Cli;

fn exit_code(err: &LrcError) -> u8 {
    match err.class() {
        ErrorClass::Config => 2,
        ErrorClass::Parse => 3,
        ErrorClass::Numerical => 4,
    }
}

fn run(cli: Cli) -> Result<(), LrcError> {
    let cfg = cli.opts.merge_config_file()?;
    if let Some(threads) = cfg.threads {
        if threads == 0 {
            return Err(LrcError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| LrcError::Config(format!("cannot start thread pool: {e}")))?;
    }
    commands::run(cli.command, &cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
