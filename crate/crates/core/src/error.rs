use thiserror::Error;

/// Errors surfaced by the laboratory.
///
/// Variants are grouped by how the command-line front end reports them:
/// bad inputs, exceeded enumeration budgets, numerical failures and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("seed {seed} is not admissible for an L={length} register (must lie in 1..2^L)")]
    InvalidSeed { seed: u64, length: u32 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("enumeration budget exceeded: {what} needs {needed} but the cap is {cap}")]
    CapExceeded { what: String, needed: String, cap: String },

    #[error("empty support: no admissible key is consistent with the observation")]
    EmptySupport,

    #[error("quadrature did not converge: successive refinements differ by {diff:e}")]
    QuadratureNonConvergence { diff: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, needed: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed: needed.to_string(),
            cap: cap.to_string(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::Io { .. } => 4,
            Error::QuadratureNonConvergence { .. } | Error::EmptySupport => 3,
            _ => 2,
        }
    }

    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidSeed { .. } => "invalid_seed",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::EmptySupport => "empty_support",
            Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
