use thiserror::Error;

/// Errors produced by the gear model, the synthesizer and the file readers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The ratio formula has a zero denominator (Z_F = 2·Z_P1 or Z_P1 = Z_P2).
    #[error("degenerate gear ratio denominator: {0}")]
    DegenerateRatio(&'static str),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid actuator spec: {0}")]
    InvalidActuator(String),

    /// Malformed input text. `line` is 1-based; 0 means the problem is not
    /// tied to a single line (e.g. a missing key).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
