//! Flag curvature of invariant Finsler metrics on homogeneous spaces G/H of
//! compact Lie groups, with tools to construct and certify flat flags.

pub mod curvature;
pub mod error;
pub mod flatfinder;
pub mod homspace;
pub mod liealg;
pub mod linalg;
pub mod minkowski;
pub mod par;

pub use error::{Error, Result};
pub use liealg::{Family, LieAlgebra};
pub use par::Exec;

/// Numerical thresholds shared by the certification code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities (Jacobi, closure of structure constants).
    pub algebra: f64,
    /// Relative gap for grouping rotation speeds.
    pub cluster: f64,
    /// Commutator and zero-condition residuals, relative to |u| |v|.
    pub precondition: f64,
    /// |K| below this counts as zero.
    pub zero_flag: f64,
    /// Relative size of the Gram determinant below which a flag is degenerate.
    pub degenerate: f64,
    /// Bracket-closure claims.
    pub closure: f64,
    /// Relative singular value cut for commutants.
    pub kernel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-10,
            cluster: 1e-8,
            precondition: 1e-8,
            zero_flag: 1e-7,
            degenerate: 1e-12,
            closure: 1e-10,
            kernel: 1e-9,
        }
    }
}
