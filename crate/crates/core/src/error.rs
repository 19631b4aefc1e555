use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cartan subspace is not abelian (bracket residual {0:.3e})")]
    NotAbelian(f64),

    #[error("simultaneous diagonalization failed: {0}")]
    Diagonalization(String),

    #[error("not a subalgebra (closure residual {0:.3e})")]
    NotASubalgebra(f64),

    #[error("invalid subalgebra piece: {0}")]
    InvalidPiece(String),

    #[error("element is not in the group (orthogonality residual {0:.3e})")]
    NotInGroup(f64),

    #[error("element does not normalize the isotropy algebra (residual {0:.3e})")]
    DoesNotNormalize(f64),

    #[error("torus alignment failed: {0}")]
    TorusAlignment(String),

    #[error("torus element outside the integer lattice: {0}")]
    OffLattice(String),

    #[error("norm not strongly convex at u (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotConvex {
        min_eigenvalue: f64,
        direction: Vec<f64>,
    },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("vector not in V1 (component along v0: {0:.3e})")]
    NotInV1(f64),

    #[error("parameters violate constraint: {0}")]
    Constraint(String),

    #[error("no convergence after {iterations} iterations (best residual {best_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        best: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
