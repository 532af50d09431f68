use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid torus: d={d}, n={n} (need d >= 1 and n >= 3)")]
    InvalidTorus { d: usize, n: usize },

    #[error("torus too large: d={d}, n={n}")]
    TorusTooLarge { d: usize, n: usize },

    #[error("coordinate {value} out of range [0, {n}) on axis {axis}")]
    CoordinateOutOfRange { axis: usize, value: usize, n: usize },

    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("phi undefined: giant component has size {giant_size}")]
    PhiUndefined { giant_size: usize },

    #[error("guard violation: {what} is {value}, limit {limit}")]
    Guard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("work budget exceeded after {nodes} search nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex {0} is not in the giant component")]
    NotInComponent(usize),

    #[error("invalid epsilon {0} (need epsilon > 1)")]
    InvalidEpsilon(f64),

    #[error("configuration belongs to a different torus")]
    SpecMismatch,

    #[error("n={n}: only {defined} samples have a defined phi")]
    Censored { n: usize, defined: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable short identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidTorus { .. } | Error::TorusTooLarge { .. } => "invalid_torus",
            Error::CoordinateOutOfRange { .. } | Error::DimensionMismatch { .. } => {
                "coordinate_out_of_range"
            }
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::PhiUndefined { .. } => "phi_undefined",
            Error::Guard { .. } => "guard_violation",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::EmptySet => "empty_set",
            Error::NotInComponent(_) => "not_in_component",
            Error::InvalidEpsilon(_) => "invalid_epsilon",
            Error::SpecMismatch => "spec_mismatch",
            Error::Censored { .. } => "censored",
            Error::Parse(_) => "parse_error",
            Error::Invariant(_) => "invariant_violated",
        }
    }
}
