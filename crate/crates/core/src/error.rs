use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("endorsement count {count} exceeds the {max} endorsement slots per block")]
    EndorsementsOutOfRange { count: u32, max: u32 },

    #[error("initial endorsers {initial} exceeds the {max} endorsement slots per block")]
    InitialEndorsersOutOfRange { initial: u32, max: u32 },

    #[error("invalid slot: exactly one of attacker priority ({attacker}) and honest priority ({honest}) must be zero")]
    InvalidSlot { attacker: u32, honest: u32 },

    #[error("stake fraction {0} must lie in the open interval (0, 0.5)")]
    StakeOutOfRange(f64),

    #[error("{name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("attack length must be at least 1")]
    EmptyState,

    #[error("invalid attack state: {0}")]
    InvalidState(String),

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("proposal stake {alpha_q} must exceed the target stake {alpha}")]
    ProposalNotInflated { alpha: f64, alpha_q: f64 },

    #[error("enumeration needs {needed:e} slot tuples, above the budget of {budget:e}; use Monte Carlo or importance sampling")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("insufficient history: depth {depth} needs more than {available} records within window {window}")]
    InsufficientHistory {
        depth: usize,
        available: usize,
        window: usize,
    },

    #[error("chain records are not consecutive: slot {found} follows slot {previous}")]
    NonConsecutiveSlots { previous: u64, found: u64 },

    #[error("chain history is empty")]
    EmptyHistory,

    #[error("window must be at least 2, got {0}")]
    WindowTooSmall(usize),

    #[error("sweep grid has no cell for candidate ({0}, {1}, {2})")]
    MissingCandidate(u32, u64, u64),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("invalid simulation setup: {0}")]
    InvalidSimulation(String),

    #[error("malformed chain record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
