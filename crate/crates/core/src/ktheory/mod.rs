//! `K₀(C(𝕋ⁿ))` as the even part of the integer exterior algebra.
//!
//! A module `X(q, a₁,…,a_{n−1})` has class `q − Σ_k a_k e_k∧e_n`. Automorphisms
//! of the torus act through generator substitution, and a diagonal dilation
//! multiplies the rank by `|det A|` while rescaling the twist.

mod ext;
mod module;

pub use ext::{direct_sum, wedge, ExtElement, KClass, MAX_GENERATORS};
pub use module::{
    class_of_module, descriptor_of, dilate_class, gl2_action, gl_action, pmra_level_class,
    pmra_level_closed_form, wavelet_class, ModuleDescriptor, WaveletClass,
};

use thiserror::Error;

use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KTheoryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("element has odd-degree terms and is not a K0 class")]
    OddDegree,
    #[error("matrix has det {det}; a unimodular matrix is required")]
    NotUnimodular { det: i64 },
    #[error("more than one nonzero twist; only single-twist modules can be dilated")]
    UnsupportedTwistPattern,
    #[error("the module's conjugator is not compatible with this dilation")]
    UnsupportedConjugator,
    #[error("dilation is neither diagonal nor a unimodular conjugate of a diagonal matrix")]
    UnsupportedDilation,
    #[error("invalid module descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("integer overflow")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
