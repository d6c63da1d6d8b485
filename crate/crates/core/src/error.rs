use thiserror::Error;

/// Errors raised by the thresholding library.
#[derive(Debug, Error)]
pub enum Error {
    /// An evaluation point at or below the bulk edge, or a value outside
    /// the range of an inverse map.
    #[error("domain error: {what} = {value} is outside the admissible range (bound {bound})")]
    Domain {
        what: &'static str,
        value: f64,
        bound: f64,
    },

    /// All atoms of the CDF are zero, so the threshold functional is constant.
    #[error("degenerate CDF: every atom is zero, the threshold equation has no root")]
    DegenerateCdf,

    #[error("rank bound violated: k = {k} is too large for {count} singular values ({rule})")]
    RankBound {
        k: usize,
        count: usize,
        rule: &'static str,
    },

    #[error("signal value {x} is at or below the phase transition estimate {transition}")]
    BelowTransition { x: f64, transition: f64 },

    #[error("root bracketing failed after {steps} steps: {reason}")]
    Bracket { steps: usize, reason: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::DegenerateCdf => "degenerate_cdf",
            Error::RankBound { .. } => "rank_bound",
            Error::BelowTransition { .. } => "below_transition",
            Error::Bracket { .. } => "solver",
            Error::InvalidInput(_) => "invalid_input",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::Decomposition(_) => "solver",
            Error::Parse { .. } => "parse",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
