//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] is a square complex matrix with value semantics. The
//! spectral routines ([`eigh`], [`psd_project`], [`signature`]) require a
//! Hermitian input and are the only places the crate touches an
//! eigensolver.

mod matrix;
pub(crate) mod spectral;

pub use matrix::{ComplexMatrix, C64};
pub use spectral::{
    eigh, norms_and_trace, psd_project, psd_project_decomposed, signature, EigenDecomposition,
    NormsAndTrace,
};
