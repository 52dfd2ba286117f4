use thiserror::Error;

/// Every failure the library can report. The driver maps variants onto
/// process exit codes via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("malformed couple: {0}")]
    MalformedCouple(String),

    #[error("cut does not disconnect the couple")]
    CutDoesNotDisconnect,

    #[error("momentum conservation violated at node {node}")]
    MomentumViolation { node: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("budget exceeded: estimated {estimate} evaluations, budget {budget}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing stats input: {0}")]
    MissingInput(String),

    #[error("schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }

    /// 2 for anything the user can fix in the configuration or inputs,
    /// 3 for numerical failures, 4 for exceeded enumeration budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::MomentumViolation { .. } | Error::Degenerate(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            _ => 2,
        }
    }
}
