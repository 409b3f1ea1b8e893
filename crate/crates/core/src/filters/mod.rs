//! Low-pass and high-pass filters as trigonometric polynomials.
//!
//! For a factor `d` the bank starts from a unitary `|d|×|d|` matrix whose
//! first row is constant, sets `μ_l(x) = Σ_j a_{l,j} e(jx/|d|)` and
//! `m_l(x) = μ_l(dx)`. Then `m₀(0) = √|d|` and the translates of the bank by
//! `(1/|d|)ℤ` are orthogonal with norm `|d|`.

mod bank;
mod trig;

pub use bank::{
    default_completion, haar_filter_bank, orthonormality_defect, tensor_filter,
    translate_sum_error, verify_filter_bank, FilterBank, FilterReport, ORTHONORMAL_TOL,
};
pub(crate) use bank::cartesian;
pub use trig::{e, TrigPoly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("dilation factor {0} does not satisfy |d| > 1")]
    InvalidFactor(i64),
    #[error("completion rows are not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("completion must be {d} rows of length {d}")]
    CompletionShape { d: usize },
    #[error("grid of {points} points is too small; at least {min} are needed")]
    GridTooSmall { points: usize, min: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("trigonometric polynomials have different periods")]
    PeriodMismatch,
    #[error("period must be positive")]
    NonPositivePeriod,
    #[error("tensor product of an empty list")]
    EmptyTensor,
}
