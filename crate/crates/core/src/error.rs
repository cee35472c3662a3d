use thiserror::Error;

/// Errors raised by the PT/BB84 machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no projector")]
    ZeroVector,

    #[error("PT symmetry is broken: |(r/s) sin θ| = {0} ≥ 1")]
    BrokenPhase(f64),

    #[error("CPT metric is singular at α = {0} (|α| must stay below π/2 − 1e-9)")]
    SingularMetric(f64),

    #[error("vector has non-positive CPT norm {0}")]
    CptNull(f64),

    #[error("evolution time has no solution: sin²(ωτ) would be {0} > 1")]
    NoSolution(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("measurement left a zero-norm post-state")]
    DegeneratePostState,

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
