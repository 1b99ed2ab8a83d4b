use toric_manin::analytic::AnalyticError;
use toric_manin::clemens::ClemensError;
use toric_manin::counter::CounterError;
use toric_manin::fan::FanError;
use toric_manin::invariants::InvariantError;
use toric_manin::picard::PicardError;

/// Errors mapped onto the process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: exit code 1.
    #[error("{0}")]
    Invalid(String),
    /// A computation could not be carried out: exit code 2.
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ClemensError> for CliError {
    fn from(e: ClemensError) -> Self {
        match e {
            ClemensError::InvalidFace { .. } | ClemensError::BadBoundary(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Clemens(c) => c.into(),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<PicardError> for CliError {
    fn from(e: PicardError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<CounterError> for CliError {
    fn from(e: CounterError) -> Self {
        match e {
            CounterError::Parse(_) | CounterError::Length(..) => CliError::Invalid(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}
