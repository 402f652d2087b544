use thiserror::Error;

/// Errors produced by geometry, stress and solver operations.
///
/// Structural errors (wrong shapes, mismatched kinds) are kept distinct from
/// numerical validation failures so callers can tell a misuse from bad data.
#[derive(Debug, Error)]
pub enum Error {
    /// Input has the wrong shape for the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Two operands live on different manifolds.
    #[error("manifold kind mismatch: {0}")]
    KindMismatch(String),

    /// Tangent vectors anchored at different base points.
    #[error("tangent vectors have different base points")]
    BasePointMismatch,

    /// Data does not satisfy the manifold (or matrix) invariants.
    #[error("validation failed: {0}")]
    ValidationFailed(String),

    /// A principal rotation angle is too close to pi; the principal matrix
    /// logarithm is not unique there and the distance is ill-defined.
    #[error("cut locus: rotation angle {angle} is within {tol} of pi")]
    CutLocus { angle: f64, tol: f64 },

    /// A matrix required to be positive definite has an eigenvalue at or
    /// below the acceptance floor.
    #[error("not positive definite: eigenvalue {eigenvalue} below floor {floor}")]
    NotPositiveDefinite { eigenvalue: f64, floor: f64 },

    /// Two objects coincide, so inverse-distance weights are undefined.
    #[error("objects {i} and {j} are at zero distance; {scheme} weights are undefined")]
    DegenerateDistance { i: usize, j: usize, scheme: &'static str },

    /// Wraps an error raised while processing a specific index pair.
    #[error("at pair ({i}, {j}): {source}")]
    AtPair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    /// Iterative eigensolver exceeded its sweep budget.
    #[error("eigensolver did not converge")]
    NoConvergence,

    /// Decibel trace is undefined because the initial stress is zero.
    #[error("stress trace undefined: initial stress is zero")]
    UndefinedTrace,

    /// Quadratic solver requires a symmetric matrix.
    #[error("quadratic matrix must be symmetric")]
    NotSymmetric,

    /// Procrustes alignment with all source points coincident.
    #[error("alignment undefined: source points are coincident")]
    AlignmentUndefined,

    /// Hermitian inner product with a non-vanishing imaginary part.
    #[error("inner product has non-vanishing imaginary part {imag}")]
    NonRealInnerProduct { imag: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
