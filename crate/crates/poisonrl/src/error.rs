//! Crate-wide error type and process exit-code mapping.

use thiserror::Error;

/// Errors surfaced by model validation, solvers, simulations, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A transition row does not sum to one (or has negative entries).
    #[error("transition row for state {state}, control {control} is not stochastic (sum = {sum})")]
    RowNotStochastic {
        state: usize,
        control: usize,
        sum: f64,
    },

    /// Discount factor outside the open interval (0, 1).
    #[error("discount factor {0} is outside (0, 1)")]
    BadDiscount(f64),

    /// A state has no admissible controls.
    #[error("state {0} has an empty admissible-control set")]
    EmptyActionSet(usize),

    /// Admissible-control lists must be strictly increasing valid indices.
    #[error("state {state} has a malformed admissible-control list: {reason}")]
    BadActionList { state: usize, reason: String },

    /// Table dimensions disagree with the state/control layout.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A table entry is NaN or infinite.
    #[error("non-finite entry at state {state}, control {control}")]
    NonFiniteEntry { state: usize, control: usize },

    /// A policy selects a control outside the state's admissible set.
    #[error("policy selects inadmissible control {control} at state {state}")]
    InadmissibleControl { state: usize, control: usize },

    /// Linear system solve failed (should not happen for discounted models).
    #[error("linear system is singular: {0}")]
    SingularSystem(String),

    /// Fixed-point iteration hit its cap before reaching tolerance.
    #[error("fixed-point iteration did not converge within {max_iters} iterations")]
    NonConvergence { max_iters: usize },

    /// Power iteration found no stationary distribution (periodic or reducible chain).
    #[error("Markov chain is not ergodic under the given policy: {0}")]
    NotErgodic(String),

    /// The TD coefficient matrix was numerically singular.
    #[error("TD coefficient matrix is singular")]
    SingularA,

    /// The feature Gram matrix was numerically singular.
    #[error("feature Gram matrix is singular")]
    SingularGram,

    /// Feature matrix columns are not linearly independent.
    #[error("feature matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficientBasis { rank: usize, cols: usize },

    /// A stochastic iterate became non-finite.
    #[error("iterate diverged (non-finite entry at step {step})")]
    Divergence { step: usize },

    /// The LP solver failed to reach a conclusive optimum.
    #[error("linear program failed numerically: {0}")]
    LpNumericalFailure(String),

    /// Doubling search for the synthesis scale hit its cap.
    #[error("scale search exhausted at {0} without satisfying all constraints")]
    ScaleSearchExhausted(f64),

    /// Operation requires every state to share the full control set.
    #[error("operation requires uniform admissible-control sets; state {0} differs")]
    NonUniformControls(usize),

    /// Bad argument to an operation or command.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A theorem-level guarantee failed; indicates an implementation bug.
    #[error("theorem guarantee violated: {0}")]
    BoundViolation(String),

    /// File parse failure with location context.
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 numerical, 4 theorem violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RowNotStochastic { .. }
            | Error::BadDiscount(_)
            | Error::EmptyActionSet(_)
            | Error::BadActionList { .. }
            | Error::ShapeMismatch(_)
            | Error::NonFiniteEntry { .. }
            | Error::InadmissibleControl { .. }
            | Error::NonUniformControls(_)
            | Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::Io(_) => 2,
            Error::SingularSystem(_)
            | Error::NonConvergence { .. }
            | Error::NotErgodic(_)
            | Error::SingularA
            | Error::SingularGram
            | Error::RankDeficientBasis { .. }
            | Error::Divergence { .. }
            | Error::LpNumericalFailure(_)
            | Error::ScaleSearchExhausted(_) => 3,
            Error::BoundViolation(_) => 4,
        }
    }
}
