use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("fit did not converge: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// Library domain and validity errors come from configured values; numerical
/// errors are failures of the evaluators themselves.
impl From<einstein_rabi::Error> for CliError {
    fn from(e: einstein_rabi::Error) -> Self {
        match e {
            einstein_rabi::Error::Numerical(m) => CliError::Numerical(m),
            other => CliError::Config(other.to_string()),
        }
    }
}
