//! Command-line front end: JSON configs in, CSV time series or JSON reports out.

pub mod commands;
pub mod config;
pub mod error;
pub mod setup;
pub mod trace;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use einstein_rabi::transition::CoefficientMode;

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "rabi",
    version,
    about = "Time-dependent Einstein coefficients and cavity Rabi oscillations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Approx,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived constants of the configured scenario, as JSON.
    Constants,
    /// Transition probability P21(t) on the grid, as CSV.
    Rabi,
    /// Generalized coefficients A(t), u B21(t) and R12(t), as CSV.
    Coefficients {
        #[arg(long, value_enum, default_value = "approx")]
        mode: ModeArg,
    },
    /// Populations and entropy from the generalized rate equations, as CSV.
    Dynamics,
    /// Fit the lossy-cavity model to a digitized trace; result as JSON.
    Fit {
        /// Trace CSV: t_s,value[,weight].
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Runs one invocation and returns the text to emit. A fit that stops
/// without converging still yields its report, paired with the error.
pub fn execute(cli: &Cli) -> (Option<String>, Option<CliError>) {
    match render(cli) {
        Ok((text, err)) => (Some(text), err),
        Err(e) => (None, Some(e)),
    }
}

fn render(cli: &Cli) -> Result<(String, Option<CliError>), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config = RunConfig::load(path)?;
    let text = match &cli.command {
        Command::Constants => to_json(&commands::constants(&config)?)?,
        Command::Rabi => commands::rabi(&config)?.to_csv_string("t_s"),
        Command::Coefficients { mode } => {
            let mode = match mode {
                ModeArg::Exact => CoefficientMode::Exact,
                ModeArg::Approx => CoefficientMode::Approx,
            };
            commands::coefficients(&config, mode)?.to_csv_string("t_s")
        }
        Command::Dynamics => commands::dynamics(&config)?.to_csv_string("t_s"),
        Command::Fit { data, seed } => {
            let trace = trace::read_trace_file(data)?;
            let result = commands::fit(&config, &trace, *seed)?;
            let text = to_json(&result)?;
            let err = (!result.converged).then(|| {
                CliError::NotConverged(format!(
                    "stopped after {} evaluations with rms {:e}",
                    result.evaluations, result.residual_rms
                ))
            });
            return Ok((text, err));
        }
    };
    Ok((text, None))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}
