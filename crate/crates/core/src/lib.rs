//! Few-photon bosonic states carrying several degrees of freedom.
//!
//! States live in Fock space over composite modes (one basis label per DOF).
//! The slot picture, passive linear gates, Hong-Ou-Mandel interference,
//! down-conversion sources and the entanglement between DOFs of multi-photon
//! states are built on top of that.

pub mod error;
pub mod fock;
pub mod gates;
pub mod hom;
pub mod json;
pub mod measurement;
pub mod metrics;
pub mod pdc;
pub mod random;
pub mod symmetrizer;

pub use error::{Error, Result};
pub use fock::{Amplitude, CreationPolynomial, Dof, DofRegistry, FockState, Mode, Occupation};
pub use gates::{GateSpec, ModeUnitary};
pub use hom::{OutcomeDistribution, TwoPhotonKernel};
pub use measurement::{MeasurementKernel, PairProjector};
pub use metrics::{DensityMatrix, SchmidtDecomposition};
pub use pdc::{FourPhotonDecomposition, PairKernel, PdcConfig, SchmidtSpec};
pub use symmetrizer::{SlotKet, SymTensor};
