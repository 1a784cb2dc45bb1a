//! Density matrices and the random ensembles used to draw them.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::linalg::spectral::eigh_unchecked;
use crate::linalg::{ComplexMatrix, EigenDecomposition, C64};
use crate::measurement::BasisSet;
use crate::rng::RngStream;
use crate::tolerances::Tolerances;

/// Unit-trace PSD matrix with its spectrum cached at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct QuantumState {
    rho: ComplexMatrix,
    declared_rank: Option<usize>,
    spectrum: EigenDecomposition,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    dim: usize,
    rho: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared_rank: Option<usize>,
}

impl TryFrom<StateRepr> for QuantumState {
    type Error = QstError;

    fn try_from(repr: StateRepr) -> Result<Self> {
        if repr.rho.dim() != repr.dim {
            return Err(QstError::DimensionMismatch {
                expected: repr.dim,
                found: repr.rho.dim(),
            });
        }
        match repr.declared_rank {
            Some(r) => QuantumState::with_declared_rank(repr.rho, r),
            None => QuantumState::new(repr.rho),
        }
    }
}

impl From<QuantumState> for StateRepr {
    fn from(s: QuantumState) -> Self {
        StateRepr {
            dim: s.dim(),
            rho: s.rho,
            declared_rank: s.declared_rank,
        }
    }
}

impl QuantumState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        rho.ensure_hermitian()?;
        let rho = rho.hermitian_part();
        let spectrum = eigh_unchecked(&rho);
        let tol = Tolerances::DEFAULT;
        let min_eig = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eig < -tol.psd {
            return Err(QstError::InvalidState(format!(
                "minimum eigenvalue {min_eig:.3e} below -{:.0e}",
                tol.psd
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QstError::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(Self {
            rho,
            declared_rank: None,
            spectrum,
        })
    }

    pub fn with_declared_rank(rho: ComplexMatrix, rank: usize) -> Result<Self> {
        let mut state = Self::new(rho)?;
        let actual = state.rank();
        if actual != rank {
            return Err(QstError::InvalidState(format!(
                "declared rank {rank} but {actual} eigenvalues exceed {:.0e}",
                Tolerances::DEFAULT.rank
            )));
        }
        state.declared_rank = Some(rank);
        Ok(state)
    }

    /// Normalizes a PSD matrix by its trace.
    pub fn from_unnormalized(x: &ComplexMatrix) -> Result<Self> {
        let tr = x.trace().re;
        if tr <= f64::MIN_POSITIVE {
            return Err(QstError::ZeroTrace);
        }
        Self::new(x.scale(1.0 / tr))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QstError::InvalidState("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::with_declared_rank(ComplexMatrix::outer(&v), 1)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::with_declared_rank(ComplexMatrix::identity(dim).scale(1.0 / dim as f64), dim)
            .expect("I/d is a valid state")
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn declared_rank(&self) -> Option<usize> {
        self.declared_rank
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn spectrum(&self) -> &EigenDecomposition {
        &self.spectrum
    }

    pub fn rank(&self) -> usize {
        let tol = Tolerances::DEFAULT.rank;
        self.spectrum.eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|l| l * l).sum()
    }

    /// Leading eigenvector; for a pure state this is `|ψ⟩` up to phase.
    pub fn leading_vector(&self) -> Vec<C64> {
        self.spectrum.eigenvectors.column(0)
    }
}

/// Near-pure state `σ = (1 - q)|ψ⟩⟨ψ| + q τ`.
#[derive(Debug, Clone)]
pub struct StateModel {
    pub target: QuantumState,
    pub mixing_weight: f64,
    pub background: QuantumState,
}

impl StateModel {
    pub fn new(target: QuantumState, mixing_weight: f64, background: QuantumState) -> Result<Self> {
        if !target.is_pure() {
            return Err(QstError::NotPure {
                rank: target.rank(),
            });
        }
        if !(0.0..=1.0).contains(&mixing_weight) {
            return Err(QstError::InvalidConfig(format!(
                "mixing weight {mixing_weight} outside [0, 1]"
            )));
        }
        if target.dim() != background.dim() {
            return Err(QstError::DimensionMismatch {
                expected: target.dim(),
                found: background.dim(),
            });
        }
        Ok(Self {
            target,
            mixing_weight,
            background,
        })
    }

    pub fn realized(&self) -> QuantumState {
        let q = self.mixing_weight;
        if q == 0.0 {
            return self.target.clone();
        }
        if q == 1.0 {
            return self.background.clone();
        }
        let rho = self
            .target
            .rho()
            .scale(1.0 - q)
            .add_scaled(q, self.background.rho());
        QuantumState::new(rho).expect("convex combination of states is a state")
    }
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut RngStream) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

fn ginibre(rows: usize, cols: usize, rng: &mut RngStream) -> DMatrix<C64> {
    // column-major fill keeps the draw order independent of nalgebra internals
    let mut m = DMatrix::<C64>::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of `diag(R)` moved into `Q`.
pub fn haar_random_unitary(dim: usize, rng: &mut RngStream) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_square(q)
}

pub fn random_pure_state(dim: usize, rng: &mut RngStream) -> QuantumState {
    let u = haar_random_unitary(dim, rng);
    QuantumState::pure(&u.column(0)).expect("unit column")
}

/// `W W† / Tr(W W†)` with `W` a `dim × rank` complex Gaussian matrix.
pub fn random_rank_r_state(dim: usize, rank: usize, rng: &mut RngStream) -> Result<QuantumState> {
    if rank == 0 || rank > dim {
        return Err(QstError::BadRank { rank, dim });
    }
    let w = ginibre(dim, rank, rng);
    let ww = &w * w.adjoint();
    let tr = ww.trace().re;
    let rho = ComplexMatrix::from_square(ww).scale(1.0 / tr).hermitian_part();
    QuantumState::with_declared_rank(rho, rank)
}

pub fn random_full_rank_state(dim: usize, rng: &mut RngStream) -> QuantumState {
    random_rank_r_state(dim, dim, rng).expect("full rank is in range")
}

/// `n_bases` bases on `n_qubits` qubits, each a tensor product of
/// independent single-qubit Haar unitaries.
pub fn local_random_bases(n_qubits: usize, n_bases: usize, rng: &mut RngStream) -> BasisSet {
    BasisSet::local_random(n_qubits, n_bases, rng)
}

/// `⟨ψ|ρ|ψ⟩` clamped to `[0, 1]`.
pub fn fidelity(psi: &QuantumState, rho: &QuantumState) -> Result<f64> {
    if !psi.is_pure() {
        return Err(QstError::NotPure { rank: psi.rank() });
    }
    if psi.dim() != rho.dim() {
        return Err(QstError::DimensionMismatch {
            expected: psi.dim(),
            found: rho.dim(),
        });
    }
    let v = psi.leading_vector();
    let rv = rho.rho().as_dmatrix() * nalgebra::DVector::from_vec(v.clone());
    let overlap: C64 = v.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.re.clamp(0.0, 1.0))
}

pub fn infidelity(psi: &QuantumState, rho: &QuantumState) -> Result<f64> {
    Ok(1.0 - fidelity(psi, rho)?)
}
