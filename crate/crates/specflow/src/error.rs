//! Crate-wide error type and severity classification for experiment exit codes.

use thiserror::Error;

/// Errors produced by library operations and the experiment runner.
#[derive(Error, Debug)]
pub enum Error {
    /// Malformed textual input (alpha spec, roof spec, decimal strings).
    #[error("parse error: {0}")]
    Parse(String),

    /// A scenario or parameter table failed schema validation.
    #[error("invalid scenario: {0}")]
    Scenario(String),

    /// The working precision or a configured cap cannot support the request.
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// A theorem hypothesis does not hold for the supplied objects
    /// (for example a roof with zero sum of jumps fed to the drift search).
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// A quantitative contract that the theory guarantees was violated
    /// numerically. Never downgraded; surfaces loudly.
    #[error("falsification event: {0}")]
    Falsification(String),

    /// Two independent computation routes disagreed beyond tolerance.
    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Scenario(_) | Error::Json(_) => 2,
            Error::Precision(_) | Error::Io(_) => 3,
            Error::Hypothesis(_) => 4,
            Error::Falsification(_) | Error::Consistency(_) => 5,
        }
    }
}
