use thiserror::Error;

use mwrc::code::CodeError;
use mwrc::export::ExportError;
use mwrc::regions::RegionError;
use mwrc::sim::SimError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFCHECK: i32 = 1;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("self-check failed")]
    SelfCheckFailed,
    #[error("{0}")]
    Region(#[from] RegionError),
    #[error("{0}")]
    Simulation(SimError),
    #[error("cannot write output: {0}")]
    Export(#[from] ExportError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelfCheckFailed => EXIT_SELFCHECK,
            CliError::Budget(_) => EXIT_BUDGET,
            _ => EXIT_ARGUMENT,
        }
    }

    /// Budget breaches are told apart from other simulation errors.
    pub fn from_sim(e: SimError, context: &str) -> Self {
        match e {
            SimError::BudgetExceeded { .. } | SimError::Code(CodeError::BudgetExceeded { .. }) => {
                CliError::Budget(format!("{context}: {e}"))
            }
            other => CliError::Simulation(other),
        }
    }
}
