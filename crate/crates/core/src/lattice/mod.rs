//! Exact integer lattice machinery.
//!
//! Dilation matrices are validated and factored in [`dilation`], coset
//! representatives of `ℤⁿ/Aⁱℤⁿ` with the d-adic enumeration live in
//! [`cosets`], and the `SL(3,ℤ)` cofactor completion is in [`completion`].
//! No floating point is used anywhere in this module.

pub mod completion;
pub mod cosets;
pub mod dilation;
pub mod gcd;
mod matrix;

pub use completion::{sl3_with_cofactors, CompletionWitness, UnimodularCompletion};
pub use cosets::{coset_base, coset_table, coset_table_with_cap, reduce_mod, CosetTable, DEFAULT_LEVEL_CAP};
pub use dilation::{conjugate_spec, rational_conjugate, validate_dilation, DilationForm, DilationSpec, FormHint};
pub use matrix::IntMatrix;

pub(crate) use matrix::{narrow, solve_integral};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not square ({rows} rows, a row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("|det A| = 1; a dilation needs |det A| > 1")]
    UnitDeterminant,
    #[error("diagonal factor d_{index} = {value} does not satisfy |d_j| > 1")]
    NotExpanding { index: usize, value: i64 },
    #[error("conjugator has det {det}; an element of SL(n,Z) is required")]
    NotUnimodular { det: i64 },
    #[error("S^-1 A S is not an integer matrix")]
    NonIntegerConjugate,
    #[error("matrix is not diagonal (after conjugation, if a conjugator was given)")]
    NotDiagonal,
    #[error("d^i = {requested} coset representatives exceed the cap of {cap}")]
    LevelOverflow { requested: u128, cap: u64 },
    #[error("gcd({x}, {y}, {z}) = {gcd}; a coprime triple is required")]
    NotCoprime { x: i64, y: i64, z: i64, gcd: i64 },
    #[error("integer overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}
