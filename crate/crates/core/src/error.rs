use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("set is empty: {0}")]
    EmptySet(String),
    #[error("point is outside the set")]
    OutsideSet,
    #[error("vector is not normal to the set at the base point")]
    NotNormal,
    #[error("base pair is not in the graph of the subdifferential")]
    NotInGraph,
    #[error("(x, lambda) is not a solution of the system")]
    NotSolution,
    #[error("multiplier is noncritical; no witness ray to probe")]
    Noncritical,
    #[error("basic constraint qualification fails at the point")]
    BcqFailure,
    #[error("semismooth Newton did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn dim_check(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{what}: expected {expected}, got {got}")))
    }
}
