use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64};
use crate::error::Result;
use crate::tolerances::Tolerances;

/// Spectral decomposition `A = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and the columns of
/// `eigenvectors` follow the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(diag(λ)) V†`, skipping eigenpairs where `f` returns zero.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let v = self.eigenvectors.as_dmatrix();
        let kept: Vec<(usize, f64)> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, f(l)))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        let mut scaled = DMatrix::<C64>::zeros(d, kept.len());
        let mut plain = DMatrix::<C64>::zeros(d, kept.len());
        for (c, &(i, w)) in kept.iter().enumerate() {
            for r in 0..d {
                scaled[(r, c)] = v[(r, i)] * w;
                plain[(r, c)] = v[(r, i)];
            }
        }
        ComplexMatrix::from_square(scaled * plain.adjoint()).hermitian_part()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Hermitian eigendecomposition.
pub fn eigh(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    a.ensure_hermitian()?;
    Ok(eigh_unchecked(a))
}

pub(crate) fn eigh_unchecked(a: &ComplexMatrix) -> EigenDecomposition {
    let d = a.dim();
    let sym = a.hermitian_part().into_dmatrix();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors =
        ComplexMatrix::from_square(DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]));
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
pub fn psd_project(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.ensure_hermitian()?;
    Ok(psd_project_decomposed(a).0)
}

/// PSD projection that also returns the decomposition of the input.
/// The input is symmetrized rather than checked.
pub fn psd_project_decomposed(a: &ComplexMatrix) -> (ComplexMatrix, EigenDecomposition) {
    let eig = eigh_unchecked(a);
    let projected = eig.reconstruct_with(|l| l.max(0.0));
    (projected, eig)
}

/// Counts of eigenvalues above `zero_tol` and below `-zero_tol`.
///
/// `zero_tol` defaults to `1e-9 * ‖A‖_F`.
pub fn signature(a: &ComplexMatrix, zero_tol: Option<f64>) -> Result<(usize, usize)> {
    let eig = eigh(a)?;
    let tol = zero_tol.unwrap_or(Tolerances::DEFAULT.signature * a.frobenius_norm());
    let n_plus = eig.eigenvalues.iter().filter(|&&l| l > tol).count();
    let n_minus = eig.eigenvalues.iter().filter(|&&l| l < -tol).count();
    Ok((n_plus, n_minus))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormsAndTrace {
    pub frobenius: f64,
    pub trace: C64,
}

pub fn norms_and_trace(a: &ComplexMatrix) -> NormsAndTrace {
    NormsAndTrace {
        frobenius: a.frobenius_norm(),
        trace: a.trace(),
    }
}

impl ComplexMatrix {
    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .as_dmatrix()
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Schatten p-norm; `p = f64::INFINITY` gives the operator norm.
    pub fn schatten_norm(&self, p: f64) -> f64 {
        let s = self.singular_values();
        if p.is_infinite() {
            s.first().copied().unwrap_or(0.0)
        } else {
            s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let eig = eigh(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues.len(), 3);
        for l in &eig.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
        assert!(eig.eigenvectors.is_unitary(1e-12));
    }

    #[test]
    fn diagonal_sorted_descending() {
        let eig = eigh(&ComplexMatrix::from_real_diagonal(&[-1.0, 2.0])).unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap();
        let eig = eigh(&y).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
        assert!(eig.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(eigh(&a), Err(crate::QstError::NotHermitian { .. })));
        assert!(psd_project(&a).is_err());
        assert!(signature(&a, None).is_err());
    }

    #[test]
    fn projection_clips_negative_eigenvalues() {
        let p = psd_project(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn signature_of_explicit_spectrum() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.0]);
        assert_eq!(signature(&a, None).unwrap(), (1, 1));
        assert_eq!(signature(&ComplexMatrix::identity(5), None).unwrap(), (5, 0));
    }

    #[test]
    fn identity_norms() {
        let n = norms_and_trace(&ComplexMatrix::identity(4));
        assert!((n.trace.re - 4.0).abs() < 1e-15);
        assert!((n.frobenius - 2.0).abs() < 1e-15);
        let z = norms_and_trace(&ComplexMatrix::zeros(3));
        assert_eq!(z.frobenius, 0.0);
        assert_eq!(z.trace, c(0.0, 0.0));
        assert!((ComplexMatrix::identity(4).schatten_norm(1.0) - 4.0).abs() < 1e-12);
        assert!((ComplexMatrix::identity(4).schatten_norm(f64::INFINITY) - 1.0).abs() < 1e-12);
    }
}
