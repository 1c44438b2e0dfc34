//! Dense complex linear algebra on labeled tensor-product spaces.

mod chol;
mod eigen;
mod matrix;
mod space;
mod state;
mod svd;

pub use chol::{cholesky, inverse_from_cholesky, solve_spd};
pub use eigen::{eig_hermitian, HermitianEigen};
pub(crate) use eigen::eig_hermitian_part;
pub use matrix::{complete_basis, inner, norm, CMatrix};
pub(crate) use matrix::orthonormalize_against;
pub use space::{RegisterSpace, Split};
pub use state::{embed_local, partial_trace_matrix, permute_matrix, DensityOperator, Operator, PureState};
pub use svd::{nuclear_norm, svd, Svd};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace} outside (0, 1]")]
    BadTrace { trace: f64 },
    #[error("state norm {norm} differs from 1")]
    NotNormalized { norm: f64 },
    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },
    #[error("register label `{0}` used twice")]
    LabelCollision(String),
    #[error("unknown register label `{0}`")]
    UnknownLabel(String),
    #[error("register `{label}` has invalid dimension {dim}")]
    InvalidDimension { label: String, dim: usize },
    #[error("total dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("operands live on different register spaces")]
    SpaceMismatch,
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
}
