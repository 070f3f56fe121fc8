use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (|det| below threshold)")]
    SingularMatrix,
    #[error("decomposition is ill-conditioned (residual {residual:.3e})")]
    IllConditioned { residual: f64 },
    #[error("point is a pole of the map")]
    PoleAtPoint,
    #[error("argument lies on the branch cut of the principal square root")]
    BranchCut,
    #[error("composition has a singular associated matrix")]
    DegenerateComposition,
    #[error("every point is fixed (map is the identity)")]
    DegenerateAllFixed,
    #[error("zero eigenvalue has no fractional power")]
    ZeroEigenvalue,
    #[error("orbit did not converge after {iterations} doublings")]
    NoConvergence { iterations: usize },
    #[error("orbit limit is within tolerance of several fixed points")]
    AmbiguousDW,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
