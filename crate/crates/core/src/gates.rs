//! Passive linear-optical unitaries.
//!
//! A gate is stored as its induced matrix on composite modes: column `k` is
//! the image of `a†_k`, so applying it substitutes `a†_k -> sum_j U[j,k] a†_j`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CreationPolynomial, DofRegistry, FockState};
use crate::json::{matrix_from_rows, JsonComplex};

pub const PATH_DOF: &str = "path";
/// Unitarity tolerance for user-supplied matrices.
pub const USER_UNITARY_TOL: f64 = 1e-10;

/// Largest entry of `U†U - I`.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    let g = u.adjoint() * u - DMatrix::<Complex64>::identity(n, n);
    g.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct ModeUnitary {
    registry: Arc<DofRegistry>,
    target: Option<String>,
    dof_matrix: Option<DMatrix<Complex64>>,
    mode_matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    pub fn identity(registry: &Arc<DofRegistry>) -> Self {
        let n = registry.mode_count();
        Self {
            registry: Arc::clone(registry),
            target: None,
            dof_matrix: None,
            mode_matrix: DMatrix::identity(n, n),
        }
    }

    /// `u` on DOF `dof`, identity on every other DOF.
    pub fn dof_unitary(registry: &Arc<DofRegistry>, dof: &str, u: &DMatrix<Complex64>) -> Result<Self> {
        let t = registry.dof_index(dof)?;
        let dim = registry.dofs()[t].dim();
        if !u.is_square() {
            return Err(Error::NonSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        if u.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.nrows(),
            });
        }
        let dev = unitarity_deviation(u);
        if dev > USER_UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let n = registry.mode_count();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let from = registry.component(k, t);
            for to in 0..dim {
                m[(registry.with_component(k, t, to), k)] = u[(to, from)];
            }
        }
        Ok(Self {
            registry: Arc::clone(registry),
            target: Some(dof.to_string()),
            dof_matrix: Some(u.clone()),
            mode_matrix: m,
        })
    }

    /// Lossless beamsplitter on the `path` DOF with reflectivity `r`:
    /// `|u> -> sqrt(R)|u> - sqrt(T)|d>`, `|d> -> sqrt(T)|u> + sqrt(R)|d>`.
    pub fn beamsplitter(registry: &Arc<DofRegistry>, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::ROutOfRange(r));
        }
        match registry.dof(PATH_DOF) {
            Ok(d) if d.dim() == 2 => {}
            _ => return Err(Error::NoPathDof),
        }
        let (sr, st) = (r.sqrt(), (1.0 - r).sqrt());
        let c = |x: f64| Complex64::new(x, 0.0);
        let u = DMatrix::from_row_slice(2, 2, &[c(sr), c(st), c(-st), c(sr)]);
        Self::dof_unitary(registry, PATH_DOF, &u)
    }

    /// General composite-mode unitary.
    pub fn from_mode_matrix(registry: &Arc<DofRegistry>, m: DMatrix<Complex64>) -> Result<Self> {
        let n = registry.mode_count();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
        let dev = unitarity_deviation(&m);
        if dev > USER_UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            registry: Arc::clone(registry),
            target: None,
            dof_matrix: None,
            mode_matrix: m,
        })
    }

    pub fn registry(&self) -> &Arc<DofRegistry> {
        &self.registry
    }

    /// Target DOF, or `None` for a general composite-mode unitary.
    pub fn target(&self) -> Option<&str> {
        self.target.as_deref()
    }

    pub fn dof_matrix(&self) -> Option<&DMatrix<Complex64>> {
        self.dof_matrix.as_ref()
    }

    pub fn mode_matrix(&self) -> &DMatrix<Complex64> {
        &self.mode_matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            registry: Arc::clone(&self.registry),
            target: self.target.clone(),
            dof_matrix: self.dof_matrix.as_ref().map(|m| m.adjoint()),
            mode_matrix: self.mode_matrix.adjoint(),
        }
    }

    /// Transforms every creation operator and re-expands. Exact for any photon number.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if *state.registry() != self.registry {
            return Err(Error::RegistryMismatch);
        }
        let poly = CreationPolynomial::from_state(state).substitute(&self.mode_matrix)?;
        Ok(poly.to_state().with_prune_tol(state.prune_tol()))
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if *self.registry != *other.registry {
            return Err(Error::RegistryMismatch);
        }
        let (target, dof_matrix) = match (&self.target, &other.target, &self.dof_matrix, &other.dof_matrix) {
            (Some(a), Some(b), Some(ma), Some(mb)) if a == b => (Some(a.clone()), Some(ma * mb)),
            _ => (None, None),
        };
        Ok(Self {
            registry: Arc::clone(&self.registry),
            target,
            dof_matrix,
            mode_matrix: &self.mode_matrix * &other.mode_matrix,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BsSpec {
    #[serde(rename = "R")]
    pub r: f64,
}

/// Gate description as read from JSON: `{"bs": {"R": 0.5}}` or
/// `{"dof": "pol", "matrix": [[..], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Beamsplitter { bs: BsSpec },
    Dof { dof: String, matrix: Vec<Vec<JsonComplex>> },
}

impl GateSpec {
    pub fn build(&self, registry: &Arc<DofRegistry>) -> Result<ModeUnitary> {
        match self {
            GateSpec::Beamsplitter { bs } => ModeUnitary::beamsplitter(registry, bs.r),
            GateSpec::Dof { dof, matrix } => ModeUnitary::dof_unitary(registry, dof, &matrix_from_rows(matrix)?),
        }
    }
}
