use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::povm::PovmMap;
use crate::error::{QstError, Result};
use crate::quantum::QuantumState;
use crate::rng::RngStream;

/// Scale `c` in the default noise bound `ε = c √(k d / N)`.
pub const DEFAULT_NOISE_SCALE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Noiseless,
    Sampled,
}

/// Per-basis outcome probabilities or frequencies, basis-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecordRepr", into = "RecordRepr")]
pub struct MeasurementRecord {
    pub dim: usize,
    pub n_bases: usize,
    pub kind: RecordKind,
    pub values: Vec<f64>,
    pub counts: Option<Vec<u64>>,
    pub shots_per_basis: Option<u64>,
    pub noise_bound: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    dim: usize,
    n_bases: usize,
    kind: RecordKind,
    values: Vec<f64>,
    #[serde(default)]
    counts: Option<Vec<u64>>,
    #[serde(default)]
    shots_per_basis: Option<u64>,
    #[serde(default)]
    noise_bound: Option<f64>,
}

impl TryFrom<RecordRepr> for MeasurementRecord {
    type Error = QstError;

    fn try_from(r: RecordRepr) -> Result<Self> {
        let rec = MeasurementRecord {
            dim: r.dim,
            n_bases: r.n_bases,
            kind: r.kind,
            values: r.values,
            counts: r.counts,
            shots_per_basis: r.shots_per_basis,
            noise_bound: r.noise_bound,
        };
        rec.validate()?;
        Ok(rec)
    }
}

impl From<MeasurementRecord> for RecordRepr {
    fn from(r: MeasurementRecord) -> Self {
        RecordRepr {
            dim: r.dim,
            n_bases: r.n_bases,
            kind: r.kind,
            values: r.values,
            counts: r.counts,
            shots_per_basis: r.shots_per_basis,
            noise_bound: r.noise_bound,
        }
    }
}

impl MeasurementRecord {
    /// Exact outcome probabilities of `state`.
    pub fn noiseless(povm: &PovmMap, state: &QuantumState) -> Result<Self> {
        if state.dim() != povm.dim() {
            return Err(QstError::DimensionMismatch {
                expected: povm.dim(),
                found: state.dim(),
            });
        }
        let values = povm
            .basis_probabilities(state.rho())
            .into_iter()
            .map(|p| p.max(0.0))
            .collect();
        Ok(Self {
            dim: povm.dim(),
            n_bases: povm.n_bases(),
            kind: RecordKind::Noiseless,
            values,
            counts: None,
            shots_per_basis: None,
            noise_bound: Some(0.0),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dim * self.n_bases;
        if self.dim == 0 {
            return Err(QstError::InvalidRecord("dimension must be positive".into()));
        }
        if self.values.len() != m {
            return Err(QstError::InvalidRecord(format!(
                "{} values for {} outcomes",
                self.values.len(),
                m
            )));
        }
        if let Some(bad) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(QstError::InvalidRecord(format!("entry {bad} is not a probability")));
        }
        if let Some(eps) = self.noise_bound {
            if !(eps >= 0.0) {
                return Err(QstError::InvalidRecord(format!("noise bound {eps} is negative")));
            }
        }
        match self.kind {
            RecordKind::Noiseless => {
                for (b, block) in self.values.chunks(self.dim).enumerate() {
                    let s: f64 = block.iter().sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(QstError::InvalidRecord(format!("basis {b} sums to {s}")));
                    }
                }
            }
            RecordKind::Sampled => {
                let shots = self
                    .shots_per_basis
                    .ok_or_else(|| QstError::InvalidRecord("sampled record without shot count".into()))?;
                if shots == 0 {
                    return Err(QstError::InvalidRecord("zero shots per basis".into()));
                }
                if let Some(counts) = &self.counts {
                    if counts.len() != m {
                        return Err(QstError::InvalidRecord("count vector length".into()));
                    }
                    for (b, block) in counts.chunks(self.dim).enumerate() {
                        if block.iter().sum::<u64>() != shots {
                            return Err(QstError::InvalidRecord(format!(
                                "basis {b} counts do not sum to {shots}"
                            )));
                        }
                    }
                    for (v, c) in self.values.iter().zip(counts) {
                        if (v - *c as f64 / shots as f64).abs() > 1e-15 {
                            return Err(QstError::InvalidRecord("frequencies disagree with counts".into()));
                        }
                    }
                } else {
                    for (b, block) in self.values.chunks(self.dim).enumerate() {
                        let s: f64 = block.iter().sum();
                        if (s - 1.0).abs() > 1e-12 {
                            return Err(QstError::InvalidRecord(format!("basis {b} sums to {s}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_outcomes(&self) -> usize {
        self.values.len()
    }

    /// Record restricted to the first `k` bases.
    pub fn prefix(&self, k: usize, noise_scale: f64) -> Self {
        let k = k.min(self.n_bases);
        let end = k * self.dim;
        let noise_bound = match (self.kind, self.shots_per_basis) {
            (RecordKind::Sampled, Some(n)) => Some(noise_bound(noise_scale, k, self.dim, n)),
            _ => self.noise_bound,
        };
        Self {
            dim: self.dim,
            n_bases: k,
            kind: self.kind,
            values: self.values[..end].to_vec(),
            counts: self.counts.as_ref().map(|c| c[..end].to_vec()),
            shots_per_basis: self.shots_per_basis,
            noise_bound,
        }
    }

    /// Checks the record against a measurement map.
    pub fn check_compatible(&self, povm: &PovmMap) -> Result<()> {
        if self.dim != povm.dim() {
            return Err(QstError::DimensionMismatch {
                expected: povm.dim(),
                found: self.dim,
            });
        }
        if self.n_bases != povm.n_bases() {
            return Err(QstError::DimensionMismatch {
                expected: povm.n_outcomes(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// `ε = c √(k d / N)`.
pub fn noise_bound(scale: f64, n_bases: usize, dim: usize, shots_per_basis: u64) -> f64 {
    scale * ((n_bases * dim) as f64 / shots_per_basis as f64).sqrt()
}

/// Finite-shot record with the default noise-bound scale.
pub fn sample_record(
    povm: &PovmMap,
    sigma: &QuantumState,
    shots_per_basis: u64,
    rng: &mut RngStream,
) -> Result<MeasurementRecord> {
    sample_record_with(povm, sigma, shots_per_basis, DEFAULT_NOISE_SCALE, rng)
}

/// Draws an independent multinomial sample of `shots_per_basis` outcomes for
/// every basis, in basis order.
pub fn sample_record_with(
    povm: &PovmMap,
    sigma: &QuantumState,
    shots_per_basis: u64,
    noise_scale: f64,
    rng: &mut RngStream,
) -> Result<MeasurementRecord> {
    if shots_per_basis == 0 {
        return Err(QstError::InvalidRecord("shots_per_basis must be at least 1".into()));
    }
    let exact = MeasurementRecord::noiseless(povm, sigma)?;
    let d = povm.dim();
    let mut counts = Vec::with_capacity(exact.values.len());
    for block in exact.values.chunks(d) {
        counts.extend(multinomial(shots_per_basis, block, rng));
    }
    let values = counts
        .iter()
        .map(|&c| c as f64 / shots_per_basis as f64)
        .collect();
    Ok(MeasurementRecord {
        dim: d,
        n_bases: povm.n_bases(),
        kind: RecordKind::Sampled,
        values,
        counts: Some(counts),
        shots_per_basis: Some(shots_per_basis),
        noise_bound: Some(noise_bound(noise_scale, povm.n_bases(), d, shots_per_basis)),
    })
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(n: u64, probs: &[f64], rng: &mut RngStream) -> Vec<u64> {
    let total: f64 = probs.iter().sum();
    let mut remaining_mass = total;
    let mut remaining = n;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(remaining);
            break;
        }
        let c = if remaining == 0 || remaining_mass <= 0.0 {
            0
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        out.push(c);
        remaining -= c;
        remaining_mass -= p;
    }
    out
}
