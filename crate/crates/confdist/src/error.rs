use thiserror::Error;

/// Errors surfaced by constructors, evaluators, and engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or model parameter violates its domain (nu <= 0, scale <= 0, ...).
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// A function argument is outside the valid range (u not in (0,1), x <= 0, ...).
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// The operation is not defined for this input kind (quantile of a discrete law, ...).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Not enough observations or draws to evaluate the request.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The sample carries no information about the parameter (all values identical, ...).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// An evaluation grid is invalid or failed the tail rule after auto-widening.
    #[error("bad grid: {0}")]
    Grid(String),

    /// Malformed caller input (empty study list, non-monotone study CD, bad CSV, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A simulation tolerance is too tight for the attempt budget; carries the
    /// smallest distance seen so the caller can pick a feasible epsilon.
    #[error("epsilon {epsilon} too small: acceptance rate {rate:.3e} after {attempts} attempts (min distance seen {min_distance:.6e})")]
    EpsilonTooSmall {
        epsilon: f64,
        rate: f64,
        attempts: u64,
        min_distance: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
