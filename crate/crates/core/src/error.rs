use thiserror::Error;

/// Errors produced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// A lattice, signal or experiment was described with incompatible parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested operation has no implementation for this lattice.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input data has the wrong shape or is too short.
    #[error("invalid input: {0}")]
    Input(String),

    /// A value fell outside the domain of a closed-form conversion.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// An optimizer produced a non-finite objective.
    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    #[error("demo failed: {0}")]
    Demo(String),

    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Io(std::io::Error::other(format!("{other:?}"))),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}
