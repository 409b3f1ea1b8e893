//! Projective multiresolution analyses over the n-torus.
//!
//! - [`lattice`]: dilation matrices, coset tables of `ℤⁿ/Aⁱℤⁿ`, `SL(3,ℤ)`
//!   cofactor completion.
//! - [`ktheory`]: `K₀(C(𝕋ⁿ))` classes of the modules `X(q, a)` and how
//!   dilations and torus automorphisms act on them.
//! - [`filters`]: Haar-type filter banks as trigonometric polynomials.
//! - [`analysis`]: sections of the Hilbert module Ξ, truncated lattice sums
//!   with tail bounds, refinement checks.
//! - [`frames`]: module frames `{Dⁱ ε_v Ψ_k}` and their verification.
//!
//! ```
//! use torus_pmra::lattice::{coset_table, DilationSpec};
//!
//! let spec = DilationSpec::diagonal(&[2, 2]).unwrap();
//! let t = coset_table(&spec, 1).unwrap();
//! assert_eq!(t.reps(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
//! ```

pub mod analysis;
pub mod filters;
pub mod frames;
pub mod ktheory;
pub mod lattice;
pub mod serde_float;

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    KTheory(#[from] ktheory::KTheoryError),
    #[error(transparent)]
    Filter(#[from] filters::FilterError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error(transparent)]
    Frame(#[from] frames::FrameError),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/k-theory.md")]
    mod k_theory {}
    #[doc = include_str!("../../../book/src/filters.md")]
    mod filters {}
    #[doc = include_str!("../../../book/src/sections.md")]
    mod sections {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
