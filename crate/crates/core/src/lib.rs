//! Numerical tools for quantum string commitments: state metrics, conditional
//! min-entropy, balanced hashing, a protocol model with honest execution, binding
//! attacks built from Uhlmann unitaries, and the resulting length bounds.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix the precision for callers who do not need the choice.

// `!(x > 0)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod bounds;
pub mod entropy;
pub mod hashing;
pub mod linalg;
pub mod metrics;
pub mod policy;
pub mod protocol;
pub mod random;
pub mod scalar;
pub mod suite;

pub type Matrix = linalg::CMatrix<f64>;
pub type Density = linalg::DensityOperator<f64>;
pub type Pure = linalg::PureState<f64>;
pub type Cq = metrics::CQState<f64>;
pub type MinEntropy = entropy::MinEntropyResult<f64>;
pub type Execution = protocol::ExecutionResult<f64>;

pub type Matrix32 = linalg::CMatrix<f32>;
pub type Density32 = linalg::DensityOperator<f32>;
pub type Pure32 = linalg::PureState<f32>;
pub type Cq32 = metrics::CQState<f32>;
pub type MinEntropy32 = entropy::MinEntropyResult<f32>;
pub type Execution32 = protocol::ExecutionResult<f32>;
