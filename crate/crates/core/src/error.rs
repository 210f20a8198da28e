use thiserror::Error;

/// Errors raised by the geometry kernel, polytope operations and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A polytope or measure description violates its structural invariants.
    #[error("invalid polytope spec: {0}")]
    Spec(String),

    /// The body is the single point O, or the origin is not an interior point.
    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    /// A point does not satisfy the invariants of its model.
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Dimensions of two inputs disagree.
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Quadrature kind not available in the requested dimension.
    #[error("unsupported quadrature: {0}")]
    UnsupportedQuadrature(String),

    /// A separating horosphere was requested for a point inside the body.
    #[error("point lies inside the polytope")]
    PointInside,

    /// The solver only accepts even (antipodally symmetric) measures.
    #[error("measure is not even: {0}")]
    NotEven(String),

    /// No rescaling of the vector reaches the requested constraint level.
    #[error("constraint level unreachable: {0}")]
    Unreachable(String),

    /// A measure direction has no matching horoball in the polytope.
    #[error("measure direction {0} does not match any polytope direction")]
    MismatchedDirections(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
