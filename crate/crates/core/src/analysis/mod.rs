//! Sections of the Hilbert module Ξ, evaluated on the frequency side.
//!
//! A [`Section`] is an expression tree over closed-form building blocks. The
//! `C(𝕋ⁿ)`-valued inner product `⟨ξ,η⟩(t) = Σ_p conj(ξ)η(t − p)` is computed as
//! a truncated lattice sum whose remainder is bounded using the attached
//! [`DecayModel`].

mod checks;
mod decay;
mod grid;
mod section;

pub use checks::{
    check_quasi_periodicity, check_refinement, check_unit_lattice_norm, lattice_sum,
    module_inner_product, rigged_inner_product, xi_membership, LatticeSumResult,
    QuasiPeriodReport, RefinementReport, UnitNormReport, XiReport,
};
pub(crate) use checks::offsets as lattice_offsets;
pub use decay::{DecayModel, DecayTerm, Envelope};
pub use grid::{samples_csv, BoxGrid, TorusGrid};
pub use section::{
    bump, dilate, haar_mask, haar_tensor, meyer_nu, meyer_phi, meyer_psi, modulate, sinc,
    DilationCacheSlot, Section,
};

use thiserror::Error;

use crate::filters::FilterError;
use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("decay models are not summable over the lattice")]
    NonSummableDecay,
    #[error("truncated product depth must be at least 1")]
    DepthZero,
    #[error("sections do not share a quasi-period (q, a)")]
    QuasiPeriodMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
