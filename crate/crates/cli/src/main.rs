use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rabi_cli::{execute, Cli, CliError};

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (text, err) = execute(&cli);
    let err = match text.map(|t| emit(&cli, &t)) {
        Some(Err(e)) => Some(e),
        _ => err,
    };
    match err {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("rabi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
