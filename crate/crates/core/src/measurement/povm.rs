use nalgebra::DMatrix;

use super::basis::BasisSet;
use crate::error::{QstError, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Linear map `X ↦ (Tr(X E_μ))_μ` of a weighted union of orthonormal bases.
///
/// Effects are `E_(b,i) = w_b |b_i⟩⟨b_i|` with `w_b = 1/k`. They are kept in
/// factored form: the basis vectors are stacked side by side in one
/// `d × (k d)` matrix so a full application is two matrix products.
#[derive(Debug, Clone)]
pub struct PovmMap {
    dim: usize,
    n_bases: usize,
    stacked: DMatrix<C64>,
    weights: Vec<f64>,
}

impl PovmMap {
    pub fn from_bases(bases: &BasisSet) -> Self {
        let d = bases.dim();
        let k = bases.len();
        let mut stacked = DMatrix::<C64>::zeros(d, k * d);
        for (b, u) in bases.bases().iter().enumerate() {
            stacked.columns_mut(b * d, d).copy_from(u.as_dmatrix());
        }
        let w = if k == 0 { 0.0 } else { 1.0 / k as f64 };
        Self {
            dim: d,
            n_bases: k,
            stacked,
            weights: vec![w; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_bases(&self) -> usize {
        self.n_bases
    }

    /// Number of outcomes `m = k d`.
    pub fn n_outcomes(&self) -> usize {
        self.n_bases * self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis_vector(&self, outcome: usize) -> Vec<C64> {
        self.stacked.column(outcome).iter().copied().collect()
    }

    pub fn effect(&self, outcome: usize) -> ComplexMatrix {
        let w = self.weights[outcome / self.dim];
        ComplexMatrix::outer(&self.basis_vector(outcome)).scale(w)
    }

    pub fn effects(&self) -> Vec<ComplexMatrix> {
        (0..self.n_outcomes()).map(|mu| self.effect(mu)).collect()
    }

    fn check_dim(&self, x: &ComplexMatrix) -> Result<()> {
        if x.dim() != self.dim {
            return Err(QstError::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `y_μ = Tr(X E_μ)` for Hermitian `X`.
    pub fn apply_map(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        x.ensure_hermitian()?;
        let mut y = self.basis_probabilities(x);
        for (b, w) in self.weights.iter().enumerate() {
            for v in &mut y[b * self.dim..(b + 1) * self.dim] {
                *v *= w;
            }
        }
        Ok(y)
    }

    /// Unweighted per-basis expectations `⟨b_i|X|b_i⟩`; each block sums to `Tr X`.
    ///
    /// This is the map estimators fit against, in the same units as
    /// measurement records.
    pub fn basis_probabilities(&self, x: &ComplexMatrix) -> Vec<f64> {
        let xb = x.as_dmatrix() * &self.stacked;
        (0..self.n_outcomes())
            .map(|mu| self.stacked.column(mu).dotc(&xb.column(mu)).re)
            .collect()
    }

    /// Adjoint of [`basis_probabilities`](Self::basis_probabilities):
    /// `Σ_μ r_μ |b_μ⟩⟨b_μ|`.
    pub fn basis_adjoint(&self, r: &[f64]) -> ComplexMatrix {
        debug_assert_eq!(r.len(), self.n_outcomes());
        let mut scaled = self.stacked.clone();
        for (mu, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::new(r[mu], 0.0);
        }
        ComplexMatrix::from_square(scaled * self.stacked.adjoint()).hermitian_part()
    }

    /// `Σ_μ y_μ E_μ`, the adjoint of [`apply_map`](Self::apply_map).
    pub fn apply_adjoint(&self, y: &[f64]) -> ComplexMatrix {
        let r: Vec<f64> = y
            .iter()
            .enumerate()
            .map(|(mu, v)| v * self.weights[mu / self.dim])
            .collect();
        self.basis_adjoint(&r)
    }

    /// Largest eigenvalue of `A†A` for the unweighted map `A`, by power
    /// iteration started from the identity plus a fixed perturbation.
    pub fn basis_lipschitz(&self) -> f64 {
        let d = self.dim;
        if self.n_bases == 0 {
            return 0.0;
        }
        let mut x = ComplexMatrix::from_fn(d, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            let t = (i * 7 + j * 13) as f64;
            C64::new(base + 1e-3 * (t.sin()), 1e-3 * (t.cos()) * if i == j { 0.0 } else { 1.0 })
        })
        .hermitian_part();
        let mut lambda = 0.0;
        for _ in 0..100 {
            let n = x.frobenius_norm();
            x = x.scale(1.0 / n);
            let y = self.basis_adjoint(&self.basis_probabilities(&x));
            let next = x.inner_re(&y);
            let done = (next - lambda).abs() <= 1e-14 * next.abs();
            lambda = next;
            x = y;
            if done {
                break;
            }
        }
        lambda
    }

    /// Splits an outcome vector into per-basis blocks.
    pub fn blocks<'a>(&self, values: &'a [f64]) -> impl Iterator<Item = &'a [f64]> {
        values.chunks(self.dim)
    }
}
