//! Entanglement and coherence quantifiers: the K coefficient, Schmidt
//! decomposition, partial traces over a DOF and purity.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DofRegistry, FockState};
use crate::gates::{unitarity_deviation, PATH_DOF, USER_UNITARY_TOL};
use crate::json::{matrix_from_rows, matrix_to_rows, JsonComplex};
use crate::pdc::{labeled_four_photon, PairKernel, SchmidtSpec, DOF_A, DOF_B};
use crate::symmetrizer::SlotKet;

pub const DENSITY_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest are dropped.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

/// Density matrix over an explicit list of slot-labelled basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityMatrixFile", into = "DensityMatrixFile")]
pub struct DensityMatrix {
    basis: Vec<Vec<String>>,
    matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub basis: Vec<Vec<String>>,
    pub matrix: Vec<Vec<JsonComplex>>,
}

impl TryFrom<DensityMatrixFile> for DensityMatrix {
    type Error = Error;
    fn try_from(f: DensityMatrixFile) -> Result<Self> {
        DensityMatrix::new(f.basis, matrix_from_rows(&f.matrix)?)
    }
}

impl From<DensityMatrix> for DensityMatrixFile {
    fn from(d: DensityMatrix) -> Self {
        DensityMatrixFile {
            matrix: matrix_to_rows(&d.matrix),
            basis: d.basis,
        }
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

impl DensityMatrix {
    pub fn new(basis: Vec<Vec<String>>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if basis.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: matrix.nrows(),
            });
        }
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].contains(b) {
                return Err(Error::InvalidDensityMatrix(format!("repeated basis state {b:?}")));
            }
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let herm = (&matrix - matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        // Symmetrize away the sub-tolerance anti-Hermitian part.
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        if let Some(&low) = hermitian_eigenvalues(&matrix).last() {
            if low < -DENSITY_TOL {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {low:e}")));
            }
        }
        Ok(Self { basis, matrix })
    }

    /// `sum_k w_k |ψ_k><ψ_k|` for slot kets over `labels`. The basis is the
    /// union of the supports, ordered by index tuple.
    pub fn from_slot_mixture(labels: &[String], terms: &[(f64, &SlotKet)]) -> Result<Self> {
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (_, k) in terms {
            if k.dim() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    got: k.dim(),
                });
            }
            for (t, _) in k.iter() {
                index.entry(t.clone()).or_insert(0);
            }
        }
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let n = index.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (w, k) in terms {
            let mut v = DVector::<Complex64>::zeros(n);
            for (t, a) in k.iter() {
                v[index[t]] = *a;
            }
            m += &v * v.adjoint() * Complex64::new(*w, 0.0);
        }
        let basis = index
            .keys()
            .map(|t| t.iter().map(|&i| labels[i].clone()).collect())
            .collect();
        Self::new(basis, m)
    }

    pub fn basis(&self) -> &[Vec<String>] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `tr ρ²` with slightly negative eigenvalues clamped to zero.
    pub fn purity(&self) -> f64 {
        self.eigenvalues().iter().map(|&l| l.max(0.0).powi(2)).sum()
    }

    pub fn element(&self, row: &[String], col: &[String]) -> Complex64 {
        let find = |b: &[String]| self.basis.iter().position(|x| x == b);
        match (find(row), find(col)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::default(),
        }
    }

    /// Largest elementwise difference, matching entries by basis label and
    /// treating states missing from one basis as zero rows and columns.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut all: Vec<&Vec<String>> = self.basis.iter().chain(&other.basis).collect();
        all.sort();
        all.dedup();
        let mut worst = 0.0f64;
        for r in &all {
            for c in &all {
                worst = worst.max((self.element(r, c) - other.element(r, c)).norm());
            }
        }
        worst
    }

    /// `U^{⊗n} ρ U^{†⊗n}` for a unitary `u` over the single-slot `labels`.
    /// The result is expressed on every tuple of `labels`.
    pub fn apply_slot_unitary(&self, labels: &[String], u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != labels.len() || !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: u.nrows(),
            });
        }
        let dev = unitarity_deviation(u);
        if dev > USER_UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let slots = self.basis.first().map_or(0, Vec::len);
        let old: Vec<Vec<usize>> = self
            .basis
            .iter()
            .map(|b| {
                b.iter()
                    .map(|l| {
                        labels
                            .iter()
                            .position(|x| x == l)
                            .ok_or_else(|| Error::BasisMismatch(format!("label {l} not in unitary basis")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let d = labels.len();
        let n_new = d.pow(slots as u32);
        let tuple = |mut k: usize| {
            let mut t = vec![0; slots];
            for s in (0..slots).rev() {
                t[s] = k % d;
                k /= d;
            }
            t
        };
        let w = DMatrix::from_fn(n_new, self.dim(), |r, c| {
            let t = tuple(r);
            t.iter().zip(&old[c]).map(|(&i, &j)| u[(i, j)]).product::<Complex64>()
        });
        let m = &w * &self.matrix * w.adjoint();
        let basis = (0..n_new)
            .map(|r| tuple(r).iter().map(|&i| labels[i].clone()).collect())
            .collect();
        Self::new(basis, m)
    }
}

pub fn k_coefficient(spec: &SchmidtSpec) -> f64 {
    spec.k()
}

/// `P2 / P1² - 1`. A vanishing `P2` gives the sentinel `-1`.
pub fn k_from_rates(p1: f64, p2: f64) -> Result<f64> {
    if p1.is_nan() || p1 <= 0.0 {
        return Err(Error::NonpositiveP1(p1));
    }
    Ok(p2 / (p1 * p1) - 1.0)
}

/// Photon-number moments of one path: mean `<n>` and factorial moment
/// `<n(n-1)>`, normalized by the state norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathRates {
    pub p1: f64,
    pub p2: f64,
}

pub fn path_rates(state: &FockState, path_label: &str) -> Result<PathRates> {
    let reg = state.registry();
    let path = reg.dof_index(PATH_DOF).map_err(|_| Error::NoPathDof)?;
    let label = reg.dofs()[path]
        .label_index(path_label)
        .ok_or_else(|| Error::InvalidMode(format!("no path label {path_label}")))?;
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let (mut p1, mut p2) = (0.0, 0.0);
    for (occ, a) in state.iter() {
        let n = state.count_in(occ, path, label) as f64;
        p1 += a.norm_sqr() * n;
        p2 += a.norm_sqr() * n * (n - 1.0);
    }
    Ok(PathRates {
        p1: p1 / norm,
        p2: p2 / norm,
    })
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, unit 2-norm.
    pub coefficients: Vec<f64>,
    /// Columns are the row-side Schmidt vectors.
    pub left: DMatrix<Complex64>,
    /// Columns are the column-side Schmidt vectors, so that
    /// `M / |M| = sum_i c_i left_i right_iᵀ`.
    pub right: DMatrix<Complex64>,
}

impl SchmidtDecomposition {
    pub fn spec(&self) -> SchmidtSpec {
        let n = self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        SchmidtSpec::from_coefficients(self.coefficients.iter().map(|c| c / n).collect())
            .expect("singular values are positive and normalized")
    }

    pub fn k(&self) -> f64 {
        self.coefficients.iter().map(|c| c.powi(4)).sum()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.left.nrows(), self.right.nrows());
        for (i, c) in self.coefficients.iter().enumerate() {
            m += self.left.column(i) * self.right.column(i).transpose() * Complex64::new(*c, 0.0);
        }
        m
    }
}

/// SVD of a bipartite amplitude matrix `M[a, b]`.
pub fn schmidt_decompose(m: &DMatrix<Complex64>) -> Result<SchmidtDecomposition> {
    let fro = m.norm();
    if fro == 0.0 || m.is_empty() {
        return Err(Error::ZeroMatrix);
    }
    if !fro.is_finite() {
        return Err(Error::NonFinite);
    }
    let svd = (m / Complex64::new(fro, 0.0)).svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let top = svd.singular_values[order[0]];
    order.retain(|&i| svd.singular_values[i] > SCHMIDT_CUTOFF * top);
    let coefficients = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left = DMatrix::from_columns(&order.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    let right = DMatrix::from_columns(&order.iter().map(|&i| v_t.row(i).transpose()).collect::<Vec<_>>());
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

/// Joint amplitude `C[x_u, y_d]` over composite modes of a two-photon state
/// with one photon in each path. Rows and columns index the modes whose path
/// component is `u` and `d` respectively, in registry order.
pub fn two_photon_amplitude(state: &FockState) -> Result<DMatrix<Complex64>> {
    let reg = state.registry();
    if state.photon_number() != Some(2) {
        return Err(Error::BadSector);
    }
    let path = reg.dof_index(PATH_DOF).map_err(|_| Error::NoPathDof)?;
    let side = |p: usize| -> Vec<usize> { (0..reg.mode_count()).filter(|&k| reg.component(k, path) == p).collect() };
    let (us, ds) = (side(0), side(1));
    let mut c = DMatrix::zeros(us.len(), ds.len());
    for (occ, a) in state.iter() {
        let photons = occ.photons();
        let (x, y) = match (reg.component(photons[0], path), reg.component(photons[1], path)) {
            (0, 1) => (photons[0], photons[1]),
            (1, 0) => (photons[1], photons[0]),
            _ => return Err(Error::BadSector),
        };
        let i = us.iter().position(|&k| k == x).expect("u mode");
        let j = ds.iter().position(|&k| k == y).expect("d mode");
        c[(i, j)] += a;
    }
    Ok(c)
}

/// Splits the joint amplitude of a two-photon state on an `A, B, path`
/// registry into its per-DOF pair kernels. Fails with `InvalidSpec` when the
/// two DOFs are correlated with each other.
pub fn dof_pair_kernels(state: &FockState) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let reg = state.registry();
    check_pdc_registry(reg)?;
    let c = two_photon_amplitude(state)?;
    let (da, db) = (reg.dofs()[0].dim(), reg.dofs()[1].dim());
    // rows (a_u, a_d), columns (b_u, b_d)
    let r = DMatrix::from_fn(da * da, db * db, |i, j| {
        let (au, ad) = (i / da, i % da);
        let (bu, bd) = (j / db, j % db);
        c[(au * db + bu, ad * db + bd)]
    });
    let sd = schmidt_decompose(&r)?;
    if sd.coefficients.len() != 1 {
        return Err(Error::InvalidSpec("pair state is correlated across DOFs".into()));
    }
    let unvec = |v: DVector<Complex64>, d: usize| DMatrix::from_fn(d, d, |i, j| v[i * d + j]);
    Ok((
        unvec(sd.left.column(0).into(), da),
        unvec(sd.right.column(0).into(), db),
    ))
}

fn check_pdc_registry(reg: &DofRegistry) -> Result<()> {
    let names: Vec<&str> = reg.dofs().iter().map(|d| d.name.as_str()).collect();
    if names != [DOF_A, DOF_B, PATH_DOF] {
        return Err(Error::InvalidRegistry(format!(
            "expected DOFs A, B, path; got {names:?}"
        )));
    }
    Ok(())
}

/// Reduced state of DOF `keep` from a path-labelled four-photon ket: the
/// amplitude is reshaped to `Ψ[keep tuple, rest tuple]` and `ρ = ΨΨ† / tr`.
pub fn reduced_from_slot_ket(reg: &DofRegistry, ket: &SlotKet, keep: usize) -> Result<DensityMatrix> {
    let mut rows: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut cols: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let split: Vec<(Vec<usize>, Vec<usize>, Complex64)> = ket
        .iter()
        .map(|(t, a)| {
            let k: Vec<usize> = t.iter().map(|&m| reg.component(m, keep)).collect();
            let r: Vec<usize> = t.iter().map(|&m| reg.with_component(m, keep, 0)).collect();
            (k, r, *a)
        })
        .collect();
    for (k, r, _) in &split {
        rows.entry(k.clone()).or_insert(0);
        cols.entry(r.clone()).or_insert(0);
    }
    for (i, v) in rows.values_mut().enumerate() {
        *v = i;
    }
    for (i, v) in cols.values_mut().enumerate() {
        *v = i;
    }
    let mut psi = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (k, r, a) in &split {
        psi[(rows[k], cols[r])] += a;
    }
    let rho = &psi * psi.adjoint();
    let tr = rho.trace();
    if tr.norm() == 0.0 {
        return Err(Error::ZeroState);
    }
    let labels = &reg.dofs()[keep].basis;
    let basis = rows
        .keys()
        .map(|k| k.iter().map(|&i| labels[i].clone()).collect())
        .collect();
    DensityMatrix::new(basis, rho / tr)
}

/// `tr_{other DOFs}` of a four-photon state with two photons per path,
/// computed on the `u, u, d, d` slot ket.
pub fn reduced_density(state: &FockState, keep: &str) -> Result<DensityMatrix> {
    let reg = state.registry();
    let k = reg.dof_index(keep)?;
    if keep == PATH_DOF {
        return Err(Error::InvalidRegistry("cannot keep the path DOF".into()));
    }
    let ket = labeled_four_photon(state)?;
    reduced_from_slot_ket(reg, &ket, k)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn purity_closed_form(k_a: f64, k_b: f64) -> Result<f64> {
    for (name, k) in [("K_A", k_a), ("K_B", k_b)] {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::OutOfRange {
                name,
                value: k,
                domain: "(0, 1]",
            });
        }
    }
    let p = k_a * k_b;
    Ok((1.0 + 4.0 * p + k_a * k_a + k_b * k_b + p * p) / (2.0 * (1.0 + p).powi(2)))
}

/// Purity of either reduced state of the four-photon PDC state, from the
/// pair kernels alone. The path-labelled ket is `P_A P_B + X_A X_B`, where
/// `P` keeps each pair's partners aligned across paths and `X` crosses them;
/// their Gram matrix is `[[1, k], [k, 1]]` with `k = tr((K†K)²)`.
pub fn purity_from_kernels(ka: &PairKernel, kb: &PairKernel) -> Result<f64> {
    let gram = |k: &PairKernel| -> Result<DMatrix<f64>> {
        let n = k.matrix.norm_squared();
        if n == 0.0 {
            return Err(Error::ZeroKernel);
        }
        let x = k.k() / (n * n);
        Ok(DMatrix::from_row_slice(2, 2, &[1.0, x, x, 1.0]))
    };
    let (ga, gb) = (gram(ka)?, gram(kb)?);
    let norm = 2.0 + 2.0 * ga[(0, 1)] * gb[(0, 1)];
    let g = &ga * &gb;
    Ok((&g * &g).trace() / (norm * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdc::{four_photon, polarization_mixture, two_photon, SchmidtSpec};
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn half() -> SchmidtSpec {
        SchmidtSpec::uniform(2).unwrap()
    }

    #[test]
    fn k_examples() {
        assert_abs_diff_eq!(k_coefficient(&half()), 0.5, epsilon = 1e-15);
        assert_eq!(k_coefficient(&SchmidtSpec::from_coefficients(vec![1.0]).unwrap()), 1.0);
        assert_abs_diff_eq!(k_coefficient(&SchmidtSpec::uniform(4).unwrap()), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn k_from_rates_examples() {
        assert_abs_diff_eq!(k_from_rates(0.01, 0.0002).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(k_from_rates(0.01, 0.0).unwrap(), -1.0);
        assert_eq!(k_from_rates(0.0, 0.1).unwrap_err(), Error::NonpositiveP1(0.0));
    }

    #[test]
    fn schmidt_of_diagonal_and_rank_one() {
        let h = 0.5f64.sqrt();
        let d = DMatrix::from_row_slice(2, 2, &[c(h), c(0.0), c(0.0), c(h)]);
        let s = schmidt_decompose(&d).unwrap();
        assert_eq!(s.coefficients.len(), 2);
        assert_abs_diff_eq!(s.coefficients[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!((s.reconstruct() - &d).norm(), 0.0, epsilon = 1e-14);
        let r1 = DMatrix::from_fn(3, 3, |i, j| c((i + 1) as f64 * (j as f64 - 0.5)));
        let s = schmidt_decompose(&r1).unwrap();
        assert_eq!(s.coefficients.len(), 1);
        assert_abs_diff_eq!(s.k(), 1.0, epsilon = 1e-12);
        assert_eq!(schmidt_decompose(&DMatrix::zeros(2, 2)).unwrap_err(), Error::ZeroMatrix);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(purity_closed_form(1.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(purity_closed_form(0.5, 0.5).unwrap(), 0.82, epsilon = 1e-15);
        assert_abs_diff_eq!(purity_closed_form(0.3, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(purity_closed_form(0.0, 0.5).is_err());
        assert!(purity_closed_form(0.5, 1.5).is_err());
    }

    #[test]
    fn numeric_purity_at_half_half() {
        let st = four_photon(&half(), &half()).unwrap();
        let ra = reduced_density(&st, "A").unwrap();
        let rb = reduced_density(&st, "B").unwrap();
        assert_abs_diff_eq!(ra.purity(), 0.82, epsilon = 1e-12);
        assert_abs_diff_eq!(rb.purity(), 0.82, epsilon = 1e-12);
        let ev = ra.eigenvalues();
        assert_abs_diff_eq!(ev[0], 2.25 / 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 0.25 / 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-12);
        let g = purity_from_kernels(&half().pair_kernel(), &half().pair_kernel()).unwrap();
        assert_abs_diff_eq!(g, 0.82, epsilon = 1e-14);
    }

    #[test]
    fn product_specs_are_pure() {
        let one = SchmidtSpec::from_coefficients(vec![1.0]).unwrap();
        let st = four_photon(&one, &half()).unwrap();
        assert_abs_diff_eq!(reduced_density(&st, "A").unwrap().purity(), 1.0, epsilon = 1e-12);
        assert!(reduced_density(&st, "path").is_err());
    }

    #[test]
    fn wrong_sector_is_rejected() {
        let st = two_photon(&half(), &half()).unwrap();
        assert_eq!(reduced_density(&st, "A").unwrap_err(), Error::BadSector);
    }

    #[test]
    fn density_validation() {
        let b = vec![vec!["0".to_string()], vec!["1".to_string()]];
        let mixed = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.5)]);
        assert_abs_diff_eq!(
            DensityMatrix::new(b.clone(), mixed).unwrap().purity(),
            0.5,
            epsilon = 1e-15
        );
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.6)]);
        assert!(DensityMatrix::new(b.clone(), bad_trace).is_err());
        let not_psd = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(b.clone(), not_psd).is_err());
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(b, not_herm).is_err());
    }

    #[test]
    fn mixture_purity_and_json() {
        let r = polarization_mixture(0.0).unwrap();
        assert_abs_diff_eq!(r.purity(), 0.625, epsilon = 1e-12);
        let s = serde_json::to_string(&r).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_abs_diff_eq!(back.max_abs_diff(&r), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_kernels_recovered_from_two_photon_state() {
        let a = SchmidtSpec::from_coefficients(vec![0.8, 0.6]).unwrap();
        let b = SchmidtSpec::from_coefficients(vec![0.6, 0.48, 0.64]).unwrap();
        let st = two_photon(&a, &b).unwrap();
        let (ka, kb) = dof_pair_kernels(&st).unwrap();
        let sa = schmidt_decompose(&ka).unwrap().spec();
        let sb = schmidt_decompose(&kb).unwrap().spec();
        for (x, y) in sa.coefficients().iter().zip(a.coefficients()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        for (x, y) in sb.coefficients().iter().zip(b.coefficients()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}
