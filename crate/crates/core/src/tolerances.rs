//! Numerical tolerances shared across the crate.
//!
//! Every threshold the kernels and solvers compare against lives here so that
//! a single record pins the numerical contract.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entrywise Hermiticity check, scaled by `max(1, max |a_ij|)`.
    pub hermitian: f64,
    /// Eigendecomposition reconstruction, relative to `max(1, ‖A‖_F)`.
    pub eigen_reconstruction: f64,
    /// Entrywise `U†U = I` check.
    pub unitarity: f64,
    /// Smallest admissible eigenvalue of a density matrix.
    pub psd: f64,
    /// `|Tr ρ - 1|` bound for density matrices.
    pub trace: f64,
    /// Eigenvalues above this count toward the rank of a state.
    pub rank: f64,
    /// Relative zero threshold for signatures (times `‖A‖_F`).
    pub signature: f64,
    /// Kernel elements must map below this and be this close to traceless.
    pub kernel: f64,
    /// Singular values below `null_space * σ_max` span the null space.
    pub null_space: f64,
    /// Floor on model probabilities in the likelihood.
    pub probability_floor: f64,
    /// Effects must sum to the identity within this (entrywise).
    pub povm_completeness: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        eigen_reconstruction: 1e-9,
        unitarity: 1e-10,
        psd: 1e-10,
        trace: 1e-10,
        rank: 1e-9,
        signature: 1e-9,
        kernel: 1e-8,
        null_space: 1e-9,
        probability_floor: 1e-12,
        povm_completeness: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
