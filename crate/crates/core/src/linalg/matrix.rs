use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::tolerances::Tolerances;

pub type C64 = num_complex::Complex64;

/// Square dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(QstError::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(QstError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { data })
    }

    /// Wraps a matrix already known to be square and non-empty.
    pub(crate) fn from_square(data: DMatrix<C64>) -> Self {
        debug_assert!(data.is_square() && data.nrows() > 0);
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_square(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_square(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_square(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Row-major construction; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(QstError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Rank-one projector `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.data.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_square(self.data.adjoint())
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| (self.data[(i, j)] + self.data[(j, i)].conj()) * 0.5)
    }

    /// Largest entrywise deviation `|a_ij - conj(a_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol * self.max_abs().max(1.0)
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian(Tolerances::DEFAULT.hermitian) {
            Ok(())
        } else {
            Err(QstError::NotHermitian {
                asymmetry: self.max_asymmetry(),
            })
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.data.adjoint() * &self.data;
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (gram[(i, j)] - C64::new(target, 0.0)).norm() <= tol
            })
        })
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real part of the Hilbert-Schmidt inner product `Tr(A† B)`.
    pub fn inner_re(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_square(&self.data * C64::new(s, 0.0))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &ComplexMatrix) -> Self {
        let mut out = self.data.clone();
        out.zip_apply(&other.data, |a, b| *a += b * s);
        Self::from_square(out)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::from_square(self.data.kronecker(&other.data))
    }

    /// Diagonal of `U† A U` when `self` is `A`; `⟨u_j|A|u_j⟩` for each column of `u`.
    pub fn diagonal_in_basis(&self, u: &ComplexMatrix) -> Vec<C64> {
        let au = &self.data * &u.data;
        (0..self.dim())
            .map(|j| u.data.column(j).dotc(&au.column(j)))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| [self.data[(i, j)].re, self.data[(i, j)].im]).collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ComplexMatrix {
    type Error = QstError;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: ComplexMatrix) -> Self {
        m.to_rows()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_square(&self.data + &rhs.data)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_square(&self.data - &rhs.data)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_square(&self.data * &rhs.data)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}
