use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code definition: {0}")]
    InvalidCode(String),

    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("unsupported rate {0}")]
    UnsupportedRate(String),

    #[error("K = {k} is not a multiple of the puncturing period {period}")]
    PeriodMismatch { k: usize, period: usize },

    #[error("invalid puncture pattern: {0}")]
    InvalidPuncture(String),

    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("symbol {index} out of range (block length {len})")]
    SymbolOutOfRange { index: usize, len: usize },

    #[error("symbol {0} received twice")]
    DuplicateSymbol(usize),

    #[error("decoder halted after a contradiction")]
    Halted,

    #[error("contradiction while decoding trial with seed {seed:#018x}")]
    Contradiction { seed: u64 },

    #[error("trial with seed {seed:#018x} did not complete: {reason}")]
    TrialFailed { seed: u64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
