//! Hong-Ou-Mandel experiments on a single beamsplitter.
//!
//! Inputs are two photons, one in each path, with a joint amplitude kernel
//! `phi[a1][a2]` for `a†(a1, u) a†(a2, d)`. Outcomes are classified by the
//! output path occupation only (number-resolving, unit efficiency).

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CreationPolynomial, Dof, DofRegistry, FockState};
use crate::gates::{unitarity_deviation, ModeUnitary, PATH_DOF, USER_UNITARY_TOL};
use crate::json::{matrix_from_rows, JsonComplex};

/// Name of the internal DOF carried by HOM kernels.
pub const KERNEL_DOF: &str = "pol";

#[derive(Debug, Clone)]
pub struct TwoPhotonKernel {
    labels: Vec<String>,
    matrix: DMatrix<Complex64>,
}

impl TwoPhotonKernel {
    /// Labels default to `H, V` for two levels and `0, 1, ..` otherwise.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let labels = default_labels(matrix.nrows());
        Self::with_labels(labels, matrix)
    }

    pub fn with_labels(labels: Vec<String>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if labels.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: labels.len(),
            });
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if matrix.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroKernel);
        }
        Ok(Self { labels, matrix })
    }

    pub fn from_real(dim: usize, rows: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(dim, dim, rows).map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Same kernel rescaled to unit Frobenius norm (the induced state's norm).
    pub fn normalized(&self) -> Self {
        let n = self.matrix.norm();
        Self {
            labels: self.labels.clone(),
            matrix: &self.matrix / Complex64::new(n, 0.0),
        }
    }

    pub fn registry(&self) -> Arc<DofRegistry> {
        hom_registry(&self.labels)
    }
}

fn default_labels(dim: usize) -> Vec<String> {
    if dim == 2 {
        vec!["H".into(), "V".into()]
    } else {
        (0..dim).map(|i| i.to_string()).collect()
    }
}

/// `[(KERNEL_DOF, labels), ("path", [u, d])]`
pub fn hom_registry(labels: &[String]) -> Arc<DofRegistry> {
    DofRegistry::shared(vec![
        Dof::new(KERNEL_DOF, labels.iter().cloned()),
        Dof::new(PATH_DOF, ["u", "d"]),
    ])
    .expect("kernel labels are validated")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelFile {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub matrix: Vec<Vec<JsonComplex>>,
}

impl KernelFile {
    pub fn into_kernel(self) -> Result<TwoPhotonKernel> {
        let m = matrix_from_rows(&self.matrix)?;
        match self.labels {
            Some(labels) => TwoPhotonKernel::with_labels(labels, m),
            None => TwoPhotonKernel::new(m),
        }
    }
}

/// `sum phi[a1][a2] a†(a1,u) a†(a2,d) |vac>`, normalized.
pub fn build_input(kernel: &TwoPhotonKernel) -> Result<FockState> {
    let reg = kernel.registry();
    let mode = |a: usize, path: usize| reg.mode_index(&reg.mode(&[a, path]).unwrap()).unwrap();
    let mut poly = CreationPolynomial::linear(&reg, []);
    for a1 in 0..kernel.dim() {
        for a2 in 0..kernel.dim() {
            let c = kernel.matrix[(a1, a2)];
            if c.norm() > 0.0 {
                poly.add_monomial(&[mode(a1, 0), mode(a2, 1)], c);
            }
        }
    }
    poly.to_state().normalize().map_err(|_| Error::ZeroKernel)
}

/// Output-path statistics of a two-photon state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub p_uu: f64,
    pub p_dd: f64,
    pub p_ud: f64,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.p_uu + self.p_dd + self.p_ud
    }

    /// Classifies by photons in `u` and `d`; the state must hold exactly two photons.
    pub fn of_state(state: &FockState) -> Result<Self> {
        if state.photon_number() != Some(2) {
            return Err(Error::BadPhotonNumber {
                expected: "2 photons".into(),
                got: format!("{:?}", state.photon_number()),
            });
        }
        let path = state.registry().dof_index(PATH_DOF).map_err(|_| Error::NoPathDof)?;
        let dist = state.distribution_by(|occ| state.count_in(occ, path, 0));
        let norm = state.norm_sqr();
        let p = |n_u: usize| dist.get(&n_u).copied().unwrap_or(0.0) / norm;
        Ok(Self {
            p_uu: p(2),
            p_dd: p(0),
            p_ud: p(1),
        })
    }
}

pub fn run_hom(kernel: &TwoPhotonKernel, r: f64) -> Result<OutcomeDistribution> {
    let input = build_input(kernel)?;
    let bs = ModeUnitary::beamsplitter(input.registry(), r)?;
    OutcomeDistribution::of_state(&bs.apply(&input)?)
}

/// Sweeps `normalize(lambda * sym + (1 - lambda) * antisym)`.
pub fn hom_scan(
    sym: &DMatrix<Complex64>,
    antisym: &DMatrix<Complex64>,
    labels: &[String],
    lambdas: &[f64],
    r: f64,
) -> Result<Vec<(f64, OutcomeDistribution)>> {
    if lambdas.is_empty() {
        return Err(Error::OutOfRange {
            name: "lambda grid",
            value: 0.0,
            domain: "nonempty",
        });
    }
    lambdas
        .iter()
        .map(|&l| {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::OutOfRange {
                    name: "lambda",
                    value: l,
                    domain: "[0, 1]",
                });
            }
            let m = sym * Complex64::new(l, 0.0) + antisym * Complex64::new(1.0 - l, 0.0);
            let k = TwoPhotonKernel::with_labels(labels.to_vec(), m)?;
            Ok((l, run_hom(&k, r)?))
        })
        .collect()
}

/// Probability of the antibunching (singlet) and bunching (triplet) signatures
/// behind a balanced beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSignature {
    pub singlet: f64,
    pub triplet: f64,
}

pub fn bell_discriminate(state: &FockState) -> Result<BellSignature> {
    let reg = state.registry();
    let path = match reg.dof(PATH_DOF) {
        Ok(d) if d.dim() == 2 => reg.dof_index(PATH_DOF)?,
        _ => return Err(Error::NoPathDof),
    };
    let one_each = state
        .iter()
        .all(|(occ, _)| occ.total() == 2 && state.count_in(occ, path, 0) == 1);
    if state.is_zero() || !one_each {
        return Err(Error::BadPhotonNumber {
            expected: "one photon in each input path".into(),
            got: "other".into(),
        });
    }
    let out = OutcomeDistribution::of_state(&ModeUnitary::beamsplitter(reg, 0.5)?.apply(state)?)?;
    Ok(BellSignature {
        singlet: out.p_ud,
        triplet: out.p_uu + out.p_dd,
    })
}

/// The four polarization Bell kernels `Φ+, Φ-, Ψ+, Ψ-`.
pub fn bell_kernels() -> Vec<(&'static str, TwoPhotonKernel)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        ("Phi+", [h, 0.0, 0.0, h]),
        ("Phi-", [h, 0.0, 0.0, -h]),
        ("Psi+", [0.0, h, h, 0.0]),
        ("Psi-", [0.0, h, -h, 0.0]),
    ]
    .into_iter()
    .map(|(name, m)| (name, TwoPhotonKernel::from_real(2, &m).expect("constant kernels")))
    .collect()
}

pub fn singlet_kernel() -> TwoPhotonKernel {
    bell_kernels().pop().expect("four kernels").1
}

/// `|<Ψ-| (U ⊗ U) |Ψ->|²` with `U` acting collectively on the kernel DOF.
pub fn singlet_invariance(u: &DMatrix<Complex64>) -> Result<f64> {
    let dev = unitarity_deviation(u);
    if dev > USER_UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let psi = build_input(&singlet_kernel())?;
    let g = ModeUnitary::dof_unitary(psi.registry(), KERNEL_DOF, u)?;
    Ok(psi.inner_product(&g.apply(&psi)?)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Occupation;
    use crate::symmetrizer::symmetry_split;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phi_plus_input_is_path_symmetric_triplet() {
        let (_, k) = bell_kernels().remove(0);
        let s = build_input(&k).unwrap();
        let reg = s.registry();
        let hu = reg.mode_index(&reg.mode_by_labels(&["H", "u"]).unwrap()).unwrap();
        let hd = reg.mode_index(&reg.mode_by_labels(&["H", "d"]).unwrap()).unwrap();
        let amp = s.amplitude(&Occupation::from_photons(4, &[hu, hd]));
        assert_abs_diff_eq!(amp.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn single_level_kernel_gives_one_photon_per_path() {
        let k = TwoPhotonKernel::from_real(1, &[1.0]).unwrap();
        let s = build_input(&k).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&Occupation(vec![1, 1])), Complex64::new(1.0, 0.0));
        let out = run_hom(&k, 0.5).unwrap();
        assert_abs_diff_eq!(out.p_ud, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_kernel_rejected() {
        assert_eq!(TwoPhotonKernel::from_real(2, &[0.0; 4]).unwrap_err(), Error::ZeroKernel);
    }

    #[test]
    fn distinguishable_photons_split_evenly() {
        // Four routings, each with amplitude sqrt(R)/sqrt(T) factors; the two
        // coincidence routings (R·R and T·T) do not interfere for orthogonal labels.
        let k = TwoPhotonKernel::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let out = run_hom(&k, 0.5).unwrap();
        let oracle = 0.5 * 0.5 + 0.5 * 0.5;
        assert_abs_diff_eq!(out.p_ud, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(out.p_uu, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn singlet_antibunches_for_every_reflectivity() {
        let k = singlet_kernel();
        for i in 0..=10 {
            let out = run_hom(&k, i as f64 / 10.0).unwrap();
            assert_abs_diff_eq!(out.p_ud, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bell_discrimination_matches_split_weights() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = TwoPhotonKernel::from_real(2, &[h, h, 0.0, 0.0]).unwrap();
        let sig = bell_discriminate(&build_input(&k).unwrap()).unwrap();
        let (s, a) = symmetry_split(k.matrix()).unwrap();
        assert_abs_diff_eq!(sig.triplet, s.norm_squared(), epsilon = 1e-12);
        assert_abs_diff_eq!(sig.singlet, a.norm_squared(), epsilon = 1e-12);
        assert_abs_diff_eq!(sig.singlet, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn bell_discriminate_rejects_bunched_input() {
        let k = singlet_kernel();
        let s = build_input(&k).unwrap();
        let bunched = ModeUnitary::beamsplitter(s.registry(), 0.5)
            .unwrap()
            .apply(&build_input(&bell_kernels()[0].1).unwrap())
            .unwrap();
        assert!(matches!(
            bell_discriminate(&bunched),
            Err(Error::BadPhotonNumber { .. })
        ));
    }

    #[test]
    fn kernel_file_parses() {
        let f: KernelFile =
            serde_json::from_str(r#"{"matrix": [[0, 0.7071067811865476], [-0.7071067811865476, 0]]}"#).unwrap();
        let k = f.into_kernel().unwrap();
        assert_eq!(k.labels(), ["H", "V"]);
        let bad: KernelFile = serde_json::from_str(r#"{"matrix": [[1, 0]]}"#).unwrap();
        assert!(matches!(bad.into_kernel(), Err(Error::NonSquare { .. })));
    }
}
