use std::fmt;
use std::process::ExitCode;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// I/O and other failures outside the categories below.
    Failure = 1,
    Config = 2,
    Domain = 3,
    Estimator = 4,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn new(status: Status, source: impl Into<anyhow::Error>) -> Self {
        Self {
            status,
            source: source.into(),
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Self::new(Status::Config, anyhow::anyhow!("{msg}"))
    }

    pub fn domain(msg: impl fmt::Display) -> Self {
        Self::new(Status::Domain, anyhow::anyhow!("{msg}"))
    }

    pub fn failure(msg: impl fmt::Display) -> Self {
        Self::new(Status::Failure, anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        Self {
            status: self.status,
            source: self.source.context(what.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl From<sonarknot::Error> for CliError {
    fn from(e: sonarknot::Error) -> Self {
        let status = match &e {
            e if e.is_estimator_failure() => Status::Estimator,
            sonarknot::Error::InvalidMap(_) => Status::Config,
            _ => Status::Domain,
        };
        Self::new(status, e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(Status::Failure, e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
