use thiserror::Error;

use crate::problem::IllegalMove;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("softmax input is empty")]
    EmptyMoves,

    #[error("softmax input lengths differ: {weights} weights, {biases} biases")]
    LengthMismatch { weights: usize, biases: usize },

    #[error("non-finite value in softmax input: {0}")]
    NonFinite(f64),

    #[error("temperature must be finite and positive, got {0}")]
    InvalidTemperature(f64),

    #[error("non-terminal state has no legal moves")]
    Stalled,

    #[error("malformed playout record at step {step}: {reason}")]
    MalformedRecord { step: usize, reason: String },

    #[error("illegal move at step {step}: {source}")]
    IllegalMove { step: usize, source: IllegalMove },

    #[error("score requested on a non-terminal state")]
    NotTerminal,

    #[error("probability of the best move underflowed to zero")]
    Underflow,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no run completed")]
    NoCompletedRuns,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
