//! Two-photon measurements on each path and four-photon coincidence rates.
//!
//! A kernel pair `(f, g)` defines `M = C†_f C†_g C_g C_f` with
//! `C†_f = sum_x f(x) a†_x`. On two photons in one path this is the rank-1
//! operator `|χ><χ|`, `χ = C†_f C†_g |vac>`. Rates on slot-labelled density
//! matrices use the equivalent slot form `F⊗G + G⊗F` with `F = f f†`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::DensityMatrix;
use crate::pdc::polarization_mixture;

/// Weight functions `f(a, α)`, `g(a, α)` over two DOF labels. With empty
/// `b_labels` the kernels act on the first DOF alone.
#[derive(Debug, Clone)]
pub struct MeasurementKernel {
    a_labels: Vec<String>,
    b_labels: Vec<String>,
    f: DMatrix<Complex64>,
    g: DMatrix<Complex64>,
}

impl MeasurementKernel {
    pub fn new(
        a_labels: Vec<String>,
        b_labels: Vec<String>,
        f: DMatrix<Complex64>,
        g: DMatrix<Complex64>,
    ) -> Result<Self> {
        let cols = b_labels.len().max(1);
        for m in [&f, &g] {
            if m.nrows() != a_labels.len() || m.ncols() != cols {
                return Err(Error::DimensionMismatch {
                    expected: a_labels.len() * cols,
                    got: m.len(),
                });
            }
            if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if m.iter().all(|c| c.norm() == 0.0) {
                return Err(Error::ZeroKernel);
            }
        }
        Ok(Self {
            a_labels,
            b_labels,
            f,
            g,
        })
    }

    /// Single-DOF kernels given as vectors over `labels`.
    pub fn single_dof(labels: &[String], f: &[Complex64], g: &[Complex64]) -> Result<Self> {
        Self::new(
            labels.to_vec(),
            Vec::new(),
            DMatrix::from_column_slice(f.len(), 1, f),
            DMatrix::from_column_slice(g.len(), 1, g),
        )
    }

    /// Linear polarizer pair: `f` along angle `theta`, `g` orthogonal to it.
    pub fn analyzer(theta: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        let (s, co) = theta.sin_cos();
        Self::single_dof(&["H".into(), "V".into()], &[c(co), c(s)], &[c(-s), c(co)]).expect("unit vectors")
    }

    /// Single-photon labels, `a` or `a,α`, in flattened order.
    pub fn slot_labels(&self) -> Vec<String> {
        if self.b_labels.is_empty() {
            return self.a_labels.clone();
        }
        self.a_labels
            .iter()
            .flat_map(|a| self.b_labels.iter().map(move |b| format!("{a},{b}")))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    fn flat(&self, m: &DMatrix<Complex64>) -> DVector<Complex64> {
        // row-major: index a * dB + α
        DVector::from_iterator(m.len(), m.transpose().iter().copied())
    }

    pub fn f_vector(&self) -> DVector<Complex64> {
        self.flat(&self.f)
    }

    pub fn g_vector(&self) -> DVector<Complex64> {
        self.flat(&self.g)
    }
}

/// `|χ><χ|` on two slots of one path, split into the part symmetric in both
/// DOFs and the part antisymmetric in both.
#[derive(Debug, Clone)]
pub struct PairProjector {
    pub dim: usize,
    pub symmetric: DVector<Complex64>,
    pub antisymmetric: DVector<Complex64>,
}

impl PairProjector {
    pub fn chi(&self) -> DVector<Complex64> {
        &self.symmetric + &self.antisymmetric
    }

    /// Dense operator on the `dim²` slot pairs, index `x * dim + y`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let chi = self.chi();
        &chi * chi.adjoint()
    }

    pub fn symmetric_weight(&self) -> f64 {
        self.symmetric.norm_squared()
    }

    pub fn antisymmetric_weight(&self) -> f64 {
        self.antisymmetric.norm_squared()
    }
}

pub fn two_photon_projector(kernel: &MeasurementKernel) -> PairProjector {
    let da = kernel.a_labels.len();
    let db = kernel.b_labels.len().max(1);
    let d = da * db;
    let idx = |a: usize, b: usize, a2: usize, b2: usize| (a * db + b) * d + (a2 * db + b2);
    let w0 = Complex64::new(FRAC_1_SQRT_2 / 2.0, 0.0);
    let mut sym = DVector::zeros(d * d);
    let mut anti = DVector::zeros(d * d);
    for i in 0..da {
        for j in 0..db {
            let fij = kernel.f[(i, j)];
            if fij.norm() == 0.0 {
                continue;
            }
            for m in 0..da {
                for n in 0..db {
                    let w = fij * kernel.g[(m, n)] * w0;
                    if w.norm() == 0.0 {
                        continue;
                    }
                    let same = [idx(i, j, m, n), idx(m, n, i, j)];
                    let crossed = [idx(m, j, i, n), idx(i, n, m, j)];
                    for k in same {
                        sym[k] += w;
                        anti[k] += w;
                    }
                    for k in crossed {
                        sym[k] += w;
                        anti[k] -= w;
                    }
                }
            }
        }
    }
    PairProjector {
        dim: d,
        symmetric: sym,
        antisymmetric: anti,
    }
}

fn outer(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

/// `<x' y'| F⊗G + G⊗F |x y>`
fn pair_element(f: &DMatrix<Complex64>, g: &DMatrix<Complex64>, out: (usize, usize), inp: (usize, usize)) -> Complex64 {
    f[(out.0, inp.0)] * g[(out.1, inp.1)] + g[(out.0, inp.0)] * f[(out.1, inp.1)]
}

/// `tr(ρ M_u ⊗ M_d)` for `ρ` over slot tuples `(u, u, d, d)`.
pub fn coincidence_rate(rho: &DensityMatrix, ku: &MeasurementKernel, kd: &MeasurementKernel) -> Result<f64> {
    let (lu, ld) = (ku.slot_labels(), kd.slot_labels());
    let find = |labels: &[String], l: &String| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::BasisMismatch(format!("label {l} not covered by the kernel")))
    };
    let tuples: Vec<[usize; 4]> = rho
        .basis()
        .iter()
        .map(|b| {
            if b.len() != 4 {
                return Err(Error::BasisMismatch(format!(
                    "basis state {b:?} does not have four slots"
                )));
            }
            Ok([
                find(&lu, &b[0])?,
                find(&lu, &b[1])?,
                find(&ld, &b[2])?,
                find(&ld, &b[3])?,
            ])
        })
        .collect::<Result<_>>()?;
    let (fu, gu) = (outer(&ku.f_vector()), outer(&ku.g_vector()));
    let (fd, gd) = (outer(&kd.f_vector()), outer(&kd.g_vector()));
    let m = rho.matrix();
    let mut total = Complex64::default();
    for (r, tr) in tuples.iter().enumerate() {
        for (c, tc) in tuples.iter().enumerate() {
            let rho_rc = m[(r, c)];
            if rho_rc.norm() == 0.0 {
                continue;
            }
            // tr(ρM) = sum_rc ρ[r,c] M[c,r]
            let mu = pair_element(&fu, &gu, (tc[0], tc[1]), (tr[0], tr[1]));
            let md = pair_element(&fd, &gd, (tc[2], tc[3]), (tr[2], tr[3]));
            total += rho_rc * mu * md;
        }
    }
    Ok(total.re)
}

pub const SWEEP_STEPS: usize = 64;

/// Rates with the `u` analyzer at `θ_k = k (π/2) / steps` and the `d`
/// analyzer fixed at H/V; one period of the fringe.
pub fn analyzer_sweep(rho: &DensityMatrix, steps: usize) -> Result<Vec<(f64, f64)>> {
    let fixed = MeasurementKernel::analyzer(0.0);
    (0..steps)
        .map(|k| {
            let theta = k as f64 * FRAC_PI_2 / steps as f64;
            Ok((
                theta,
                coincidence_rate(rho, &MeasurementKernel::analyzer(theta), &fixed)?,
            ))
        })
        .collect()
}

/// `(max - min) / (max + min)` of the rates.
pub fn visibility(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::DegenerateCurve(format!("{} points", curve.len())));
    }
    if curve.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let max = curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let min = curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        return Err(Error::DegenerateCurve("all rates are zero".into()));
    }
    Ok((max - min) / (max + min))
}

#[derive(Debug, Clone, Serialize)]
pub struct VisibilityReport {
    pub k_b: f64,
    pub visibility: f64,
    pub curve: Vec<[f64; 2]>,
}

/// Analyzer sweep of the polarization four-photon state with a second DOF of
/// overlap `k_b`.
pub fn visibility_report(k_b: f64) -> Result<VisibilityReport> {
    let rho = polarization_mixture(k_b)?;
    let curve = analyzer_sweep(&rho, SWEEP_STEPS)?;
    Ok(VisibilityReport {
        k_b,
        visibility: visibility(&curve)?,
        curve: curve.into_iter().map(|(t, p)| [t, p]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Dof, DofRegistry, FockState, Occupation};
    use crate::pdc::{phi4, psi4};
    use crate::symmetrizer::fock_to_sym;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// `<p| C†_f C†_g C_g C_f |q>` on the two-photon Fock basis via ladder operators.
    fn ladder_matrix(reg: &Arc<DofRegistry>, f: &[Complex64], g: &[Complex64]) -> (Vec<FockState>, DMatrix<Complex64>) {
        let n = reg.mode_count();
        let mut basis = Vec::new();
        for x in 0..n {
            for y in x..n {
                basis.push(FockState::from_entries(reg, [(Occupation::from_photons(n, &[x, y]), c(1.0))]).unwrap());
            }
        }
        let lower = |s: &FockState, w: &[Complex64]| {
            let mut out = FockState::zero(reg);
            for (k, wk) in w.iter().enumerate() {
                let t = s.apply_annihilation(&reg.mode_at(k)).unwrap().scale(wk.conj());
                out = out.add(&t).unwrap();
            }
            out
        };
        let raise = |s: &FockState, w: &[Complex64]| {
            let mut out = FockState::zero(reg);
            for (k, wk) in w.iter().enumerate() {
                let t = s.apply_creation(&reg.mode_at(k)).unwrap().scale(*wk);
                out = out.add(&t).unwrap();
            }
            out
        };
        let m = DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
            let img = raise(&raise(&lower(&lower(&basis[j], f), g), g), f);
            basis[i].inner_product(&img).unwrap()
        });
        (basis, m)
    }

    fn slot_vector(s: &FockState, d: usize) -> DVector<Complex64> {
        let t = fock_to_sym(s).unwrap();
        DVector::from_fn(d * d, |k, _| t.amplitude(&[k / d, k % d]))
    }

    #[test]
    fn projector_matches_ladder_operators() {
        let reg = DofRegistry::shared(vec![Dof::new("A", ["0", "1"]), Dof::new("B", ["x", "y", "z"])]).unwrap();
        let f = DMatrix::from_row_slice(
            2,
            3,
            &[c(0.3), Complex64::new(0.1, 0.4), c(0.0), c(-0.2), c(0.5), c(0.7)],
        );
        let g = DMatrix::from_row_slice(
            2,
            3,
            &[c(0.6), c(0.0), Complex64::new(0.0, -0.3), c(0.1), c(0.2), c(-0.4)],
        );
        let k = MeasurementKernel::new(labels(&["0", "1"]), labels(&["x", "y", "z"]), f, g).unwrap();
        let p = two_photon_projector(&k);
        assert!(p.symmetric_weight() > 1e-3 && p.antisymmetric_weight() > 1e-3);
        let (basis, ladder) = ladder_matrix(&reg, k.f_vector().as_slice(), k.g_vector().as_slice());
        let m = p.matrix();
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                let (vi, vj) = (slot_vector(bi, 6), slot_vector(bj, 6));
                let slot = (vi.adjoint() * &m * vj)[(0, 0)];
                assert_abs_diff_eq!((slot - ladder[(i, j)]).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn delta_kernel_is_doubly_occupied_projector() {
        let f = DMatrix::from_row_slice(2, 1, &[c(1.0), c(0.0)]);
        let k = MeasurementKernel::new(labels(&["H", "V"]), vec![], f.clone(), f).unwrap();
        let p = two_photon_projector(&k);
        let m = p.matrix();
        // |χ> = sqrt(2)|HH>, i.e. the state a†a†|vac> = sqrt(2)|2_H>
        assert_abs_diff_eq!(m[(0, 0)].re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.norm(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.antisymmetric_weight(), 0.0);
    }

    #[test]
    fn antisymmetric_block_vanishes_for_shared_factor() {
        let fa = [c(0.6), c(0.8)];
        let (fb, gb) = ([c(1.0), c(0.0)], [c(0.3), c(0.7)]);
        let f = DMatrix::from_fn(2, 2, |i, j| fa[i] * fb[j]);
        let g = DMatrix::from_fn(2, 2, |i, j| fa[i] * gb[j]);
        let k = MeasurementKernel::new(labels(&["0", "1"]), labels(&["x", "y"]), f, g).unwrap();
        let p = two_photon_projector(&k);
        assert_abs_diff_eq!(p.antisymmetric_weight(), 0.0, epsilon = 1e-30);
        assert!(p.symmetric_weight() > 0.1);
    }

    #[test]
    fn zero_kernel_rejected() {
        let z = DMatrix::zeros(2, 1);
        let one = DMatrix::from_element(2, 1, c(1.0));
        assert_eq!(
            MeasurementKernel::new(labels(&["H", "V"]), vec![], z, one).unwrap_err(),
            Error::ZeroKernel
        );
    }

    #[test]
    fn pure_psi4_rate_is_projector_overlap() {
        let rho = DensityMatrix::from_slot_mixture(&labels(&["H", "V"]), &[(1.0, &psi4())]).unwrap();
        let h = MeasurementKernel::single_dof(&labels(&["H", "V"]), &[c(1.0), c(0.0)], &[c(1.0), c(0.0)]).unwrap();
        let v = MeasurementKernel::single_dof(&labels(&["H", "V"]), &[c(0.0), c(1.0)], &[c(0.0), c(1.0)]).unwrap();
        // |HH>_u|VV>_d carries 1/3 of the state; M = 2|HH><HH| per path.
        assert_abs_diff_eq!(coincidence_rate(&rho, &h, &v).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_mismatch() {
        let rho = DensityMatrix::from_slot_mixture(&labels(&["H", "V"]), &[(1.0, &phi4())]).unwrap();
        let k = MeasurementKernel::single_dof(&labels(&["L", "R"]), &[c(1.0), c(0.0)], &[c(0.0), c(1.0)]).unwrap();
        assert!(matches!(coincidence_rate(&rho, &k, &k), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn visibility_edges() {
        assert_eq!(visibility(&[(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)]).unwrap(), 0.0);
        assert!(visibility(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(visibility(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).is_err());
    }

    #[test]
    fn visibility_follows_kb() {
        let v1 = visibility_report(1.0).unwrap();
        assert_abs_diff_eq!(v1.visibility, 1.0, epsilon = 1e-10);
        assert_eq!(v1.curve.len(), SWEEP_STEPS);
        for k in [0.0, 0.25, 0.5, 0.75] {
            let v = visibility_report(k).unwrap().visibility;
            assert_abs_diff_eq!(v, (1.0 + k) / (3.0 - k), epsilon = 1e-10);
        }
    }
}
