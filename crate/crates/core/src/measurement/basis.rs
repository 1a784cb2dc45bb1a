use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::haar_random_unitary;
use crate::rng::RngStream;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisType {
    Global,
    Local,
    Custom,
}

impl std::fmt::Display for BasisType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisType::Global => "global",
            BasisType::Local => "local",
            BasisType::Custom => "custom",
        })
    }
}

impl std::str::FromStr for BasisType {
    type Err = QstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(BasisType::Global),
            "local" => Ok(BasisType::Local),
            "custom" => Ok(BasisType::Custom),
            other => Err(QstError::InvalidConfig(format!("unknown basis type {other:?}"))),
        }
    }
}

/// Ordered list of measurement bases. Column `i` of `bases[b]` is the
/// `i`-th vector of basis `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisSetRepr", into = "BasisSetRepr")]
pub struct BasisSet {
    dim: usize,
    basis_type: BasisType,
    seed: Option<u64>,
    bases: Vec<ComplexMatrix>,
    labels: Vec<String>,
    /// Single-qubit factors of local bases, outermost qubit first.
    factors: Option<Vec<Vec<ComplexMatrix>>>,
}

#[derive(Serialize, Deserialize)]
struct BasisSetRepr {
    dim: usize,
    basis_type: BasisType,
    seed: Option<u64>,
    labels: Vec<String>,
    bases: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<Vec<ComplexMatrix>>>,
}

impl TryFrom<BasisSetRepr> for BasisSet {
    type Error = QstError;

    fn try_from(r: BasisSetRepr) -> Result<Self> {
        let mut set = BasisSet::new(r.dim, r.bases, r.basis_type, r.labels)?;
        set.seed = r.seed;
        if let Some(factors) = r.factors {
            if factors.len() != set.len() {
                return Err(QstError::InvalidBasis(format!(
                    "{} factor lists for {} bases",
                    factors.len(),
                    set.len()
                )));
            }
            set.factors = Some(factors);
        }
        Ok(set)
    }
}

impl From<BasisSet> for BasisSetRepr {
    fn from(s: BasisSet) -> Self {
        BasisSetRepr {
            dim: s.dim,
            basis_type: s.basis_type,
            seed: s.seed,
            labels: s.labels,
            bases: s.bases,
            factors: s.factors,
        }
    }
}

impl BasisSet {
    pub fn new(
        dim: usize,
        bases: Vec<ComplexMatrix>,
        basis_type: BasisType,
        labels: Vec<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(QstError::InvalidBasis("dimension must be positive".into()));
        }
        if labels.len() != bases.len() {
            return Err(QstError::InvalidBasis(format!(
                "{} labels for {} bases",
                labels.len(),
                bases.len()
            )));
        }
        let tol = Tolerances::DEFAULT.unitarity;
        for (b, u) in bases.iter().enumerate() {
            if u.dim() != dim {
                return Err(QstError::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
            if !u.is_unitary(tol) {
                return Err(QstError::InvalidBasis(format!("basis {b} is not unitary")));
            }
        }
        Ok(Self {
            dim,
            basis_type,
            seed: None,
            bases,
            labels,
            factors: None,
        })
    }

    pub fn computational(dim: usize) -> Self {
        Self::new(
            dim,
            vec![ComplexMatrix::identity(dim)],
            BasisType::Custom,
            vec!["computational".into()],
        )
        .expect("identity is unitary")
    }

    /// `n_bases` independent Haar-random bases drawn in order from `rng`.
    pub fn global_random(dim: usize, n_bases: usize, rng: &mut RngStream) -> Self {
        let seed = rng.seed();
        let bases: Vec<_> = (0..n_bases).map(|_| haar_random_unitary(dim, rng)).collect();
        let labels = (0..n_bases).map(|b| format!("global:seed={seed}:basis={b}")).collect();
        let mut set = Self::new(dim, bases, BasisType::Global, labels).expect("Haar unitaries");
        set.seed = Some(seed);
        set
    }

    /// Tensor products of independent single-qubit Haar unitaries.
    pub fn local_random(n_qubits: usize, n_bases: usize, rng: &mut RngStream) -> Self {
        assert!(n_qubits >= 1, "need at least one qubit");
        let seed = rng.seed();
        let mut bases = Vec::with_capacity(n_bases);
        let mut factors = Vec::with_capacity(n_bases);
        for _ in 0..n_bases {
            let fs: Vec<ComplexMatrix> = (0..n_qubits).map(|_| haar_random_unitary(2, rng)).collect();
            let u = fs[1..].iter().fold(fs[0].clone(), |acc, f| acc.kron(f));
            bases.push(u);
            factors.push(fs);
        }
        let labels = (0..n_bases).map(|b| format!("local:seed={seed}:basis={b}")).collect();
        let mut set =
            Self::new(1 << n_qubits, bases, BasisType::Local, labels).expect("products of unitaries");
        set.seed = Some(seed);
        set.factors = Some(factors);
        set
    }

    /// Random bases of the given type; `dim` must be a power of two for local bases.
    pub fn random(basis_type: BasisType, dim: usize, n_bases: usize, rng: &mut RngStream) -> Result<Self> {
        match basis_type {
            BasisType::Global => Ok(Self::global_random(dim, n_bases, rng)),
            BasisType::Local => {
                if dim < 2 || !dim.is_power_of_two() {
                    return Err(QstError::InvalidConfig(format!(
                        "local bases need a power-of-two dimension, got {dim}"
                    )));
                }
                Ok(Self::local_random(dim.trailing_zeros() as usize, n_bases, rng))
            }
            BasisType::Custom => Err(QstError::InvalidConfig("custom bases cannot be sampled".into())),
        }
    }

    /// The first `k` bases.
    pub fn prefix(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            dim: self.dim,
            basis_type: self.basis_type,
            seed: self.seed,
            bases: self.bases[..k].to_vec(),
            labels: self.labels[..k].to_vec(),
            factors: self.factors.as_ref().map(|f| f[..k].to_vec()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis_type(&self) -> BasisType {
        self.basis_type
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn factors(&self) -> Option<&[Vec<ComplexMatrix>]> {
        self.factors.as_deref()
    }
}
