//! Bounded-rank quantum state tomography toolkit.
//!
//! The crate covers the full pipeline for reconstructing low-rank density
//! matrices from projective measurements in a handful of random orthonormal
//! bases:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition, PSD projection.
//! - [`quantum`]: density matrices and Haar sampling.
//! - [`measurement`]: basis sets, the POVM map, finite-shot sampling, kernel analysis.
//! - [`estimators`]: least squares, trace minimization, maximum likelihood, feasibility.
//! - [`experiments`]: seeded drivers that repeat the estimators over many
//!   random states.
//!
//! Data-parallel loops go through [`par`], which runs on rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod linalg;
pub mod measurement;
pub mod par;
pub mod quantum;
pub mod rng;
pub mod tolerances;

pub use error::{QstError, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, C64};
pub use par::Execution;
pub use rng::RngStream;
pub use tolerances::Tolerances;
