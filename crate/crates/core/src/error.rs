use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unknown loop `{0}`")]
    UnknownLoop(String),

    #[error("divisors live on different graphs")]
    GraphMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divisor has {chips} chips at {point}, away from the base of the burn")]
    NegativeAwayFromBase { point: String, chips: i64 },

    #[error("firing did not terminate within {cap} steps")]
    IterationCap { cap: usize },

    #[error("no generic sample offset on loop `{loop_name}` after {limit} refinements")]
    SampleCollision { loop_name: String, limit: u32 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource cap exceeded: {0}")]
    Budget(String),
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
