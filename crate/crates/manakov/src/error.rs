//! Crate-wide error type.

/// Convenience alias used by every fallible API in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for configuration, numerics, and I/O failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A soliton-train description is unusable (empty, non-finite
    /// parameters, non-positive widths, unordered positions, ...).
    #[error("invalid train: {0}")]
    InvalidTrain(String),

    /// A potential description is unusable.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A spatial grid description is unusable.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A scenario file failed validation after parsing.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A numerical-quadrature routine could not reach the requested
    /// tolerance.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// An eigenvalue iteration failed to converge or verify.
    #[error("eigenvalue solve failed: {0}")]
    Eigen(String),

    /// The PDE stepper produced an unusable state (non-finite field,
    /// no inner-iteration convergence when treated as fatal, ...).
    #[error("PDE solver failed: {0}")]
    Solver(String),

    /// Peak extraction or track association failed.
    #[error("tracking failed: {0}")]
    Tracking(String),

    /// Two trajectory sets cannot be compared (mismatched track counts,
    /// disjoint time ranges, ...).
    #[error("comparison failed: {0}")]
    Comparison(String),

    /// A text document (scenario TOML, trajectory CSV, regime JSON)
    /// could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem failure while reading or writing results.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable kind tag, used by the CLI's JSON error
    /// envelope.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidTrain(_) => "invalid_train",
            Error::InvalidPotential(_) => "invalid_potential",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::Quadrature(_) => "quadrature",
            Error::Eigen(_) => "eigen",
            Error::Solver(_) => "solver",
            Error::Tracking(_) => "tracking",
            Error::Comparison(_) => "comparison",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
