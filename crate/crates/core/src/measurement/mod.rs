//! Measurement design and simulation.
//!
//! A measurement is a union of `k` orthonormal bases on a `d`-dimensional
//! space. Each basis contributes `d` rank-one effects scaled by `1/k` so that
//! the union is a single POVM. Outcomes are ordered basis-major,
//! outcome-minor: index `b * d + i` is outcome `i` of basis `b`.

mod basis;
mod kernel;
mod povm;
mod record;

pub use basis::{BasisSet, BasisType};
pub use kernel::{gell_mann_basis, kernel_analysis, map_matrix, numerical_rank, KernelReport};
pub use povm::PovmMap;
pub use record::{sample_record, sample_record_with, MeasurementRecord, RecordKind, DEFAULT_NOISE_SCALE};
