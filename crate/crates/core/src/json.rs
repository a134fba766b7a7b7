//! Small serde helpers for complex numbers and matrices in input files.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex entry written either as a bare number or as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonComplex {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        match c {
            JsonComplex::Real(re) => Complex64::new(re, 0.0),
            JsonComplex::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex::Complex { re: c.re, im: c.im }
    }
}

/// Row-major nested arrays to a dense matrix. Rows must have equal length.
pub fn matrix_from_rows(rows: &[Vec<JsonComplex>]) -> Result<DMatrix<Complex64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::ZeroMatrix);
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            got: bad.len(),
        });
    }
    let m = DMatrix::from_fn(nrows, ncols, |i, j| Complex64::from(rows[i][j]));
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

pub fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<JsonComplex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}
