use thiserror::Error;

/// Errors raised by the beta-expansion machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("floor decision remained ambiguous at the precision ceiling ({bits} bits)")]
    Ambiguous { bits: u32 },

    #[error("could not certify the expansion of 1 deep enough: {0}")]
    UndecidedParry(String),

    #[error("invalid truncation: eps*_{n}(1, beta) = 0")]
    InvalidTruncation { n: usize },

    #[error("truncation root for N = {n} is not greater than 1")]
    DegenerateRoot { n: usize },

    #[error("word {word} is not admissible{context}")]
    NotAdmissible { word: String, context: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no finite counting automaton: {0}")]
    AutomatonUnavailable(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unsupported regime: {0}")]
    RegimeUnsupported(String),

    #[error("sparsity requirement violated at level {level}")]
    SparsityViolated { level: usize },

    #[error("condition log_b2(b1) > (vhat/v)(1+v) violated: {0}")]
    ConditionViolated(String),

    #[error("slot length mismatch: expected {expected}, got {got}")]
    SlotLengthMismatch { expected: usize, got: usize },

    #[error("invalid root specification: {0}")]
    InvalidRoot(String),
}

impl Error {
    /// Short machine-readable tag used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Domain(_) => "domain",
            Error::Ambiguous { .. } => "ambiguous",
            Error::UndecidedParry(_) => "undecided-parry",
            Error::InvalidTruncation { .. } => "invalid-truncation",
            Error::DegenerateRoot { .. } => "degenerate-root",
            Error::NotAdmissible { .. } => "not-admissible",
            Error::BudgetExceeded(_) => "budget-exceeded",
            Error::AutomatonUnavailable(_) => "automaton-unavailable",
            Error::PreconditionViolated(_) => "precondition-violated",
            Error::RegimeUnsupported(_) => "regime-unsupported",
            Error::SparsityViolated { .. } => "sparsity-violated",
            Error::ConditionViolated(_) => "condition-violated",
            Error::SlotLengthMismatch { .. } => "slot-length-mismatch",
            Error::InvalidRoot(_) => "invalid-root",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
