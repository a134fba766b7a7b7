//! Photon pairs and quadruples from parametric down conversion.
//!
//! The two-photon state is a product of per-DOF pair kernels,
//! `sum K_A[a,b] K_B[α,β] a†_u(a,α) b†_d(b,β) |vac>`. The four-photon state is
//! the square of that creation polynomial. Registries built here carry three
//! DOFs in the order `A`, `B`, `path`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CreationPolynomial, Dof, DofRegistry, FockState};
use crate::gates::PATH_DOF;
use crate::metrics::DensityMatrix;
use crate::symmetrizer::{fock_to_sym, SlotKet};

pub const DOF_A: &str = "A";
pub const DOF_B: &str = "B";
const SPEC_NORM_TOL: f64 = 1e-10;
/// Slot order used for path-labelled four-photon kets.
pub const UUDD: [usize; 4] = [0, 0, 1, 1];

/// Schmidt spectrum of one DOF of a photon pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchmidtSpecFile", into = "SchmidtSpecFile")]
pub struct SchmidtSpec {
    coefficients: Vec<f64>,
    labels_a: Vec<String>,
    labels_b: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchmidtSpecFile {
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_b: Option<Vec<String>>,
}

impl TryFrom<SchmidtSpecFile> for SchmidtSpec {
    type Error = Error;
    fn try_from(f: SchmidtSpecFile) -> Result<Self> {
        let n = f.coefficients.len();
        let default = || (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        SchmidtSpec::new(
            f.coefficients,
            f.labels_a.unwrap_or_else(default),
            f.labels_b.unwrap_or_else(default),
        )
    }
}

impl From<SchmidtSpec> for SchmidtSpecFile {
    fn from(s: SchmidtSpec) -> Self {
        SchmidtSpecFile {
            coefficients: s.coefficients,
            labels_a: Some(s.labels_a),
            labels_b: Some(s.labels_b),
        }
    }
}

impl SchmidtSpec {
    /// Coefficients are stored in descending order (stable for ties).
    pub fn new(coefficients: Vec<f64>, labels_a: Vec<String>, labels_b: Vec<String>) -> Result<Self> {
        let n = coefficients.len();
        if n == 0 {
            return Err(Error::InvalidSpec("no coefficients".into()));
        }
        if labels_a.len() != n || labels_b.len() != n {
            return Err(Error::InvalidSpec(format!(
                "{n} coefficients but {} / {} labels",
                labels_a.len(),
                labels_b.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidSpec(format!("coefficient {c} is not positive")));
        }
        let norm: f64 = coefficients.iter().map(|c| c * c).sum();
        if (norm - 1.0).abs() > SPEC_NORM_TOL {
            return Err(Error::InvalidSpec(format!("sum of squares is {norm}, not 1")));
        }
        for labels in [&labels_a, &labels_b] {
            for (i, l) in labels.iter().enumerate() {
                if labels[..i].contains(l) {
                    return Err(Error::InvalidSpec(format!("repeated label \"{l}\"")));
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| coefficients[j].total_cmp(&coefficients[i]));
        Ok(Self {
            coefficients: order.iter().map(|&i| coefficients[i]).collect(),
            labels_a: order.iter().map(|&i| labels_a[i].clone()).collect(),
            labels_b: order.iter().map(|&i| labels_b[i].clone()).collect(),
        })
    }

    /// Labels `0..n` on both sides.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        let labels: Vec<String> = (0..coefficients.len()).map(|i| i.to_string()).collect();
        Self::new(coefficients, labels.clone(), labels)
    }

    pub fn uniform(terms: usize) -> Result<Self> {
        Self::from_coefficients(vec![1.0 / (terms as f64).sqrt(); terms])
    }

    /// A spectrum with `sum φ⁴ = k`: the fewest terms `d` with `1/d <= k`,
    /// one dominant coefficient and `d - 1` equal ones.
    pub fn with_k(k: f64) -> Result<Self> {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::OutOfRange {
                name: "K",
                value: k,
                domain: "(0, 1]",
            });
        }
        let mut d = (1.0 / k).ceil() as usize;
        if (d as f64) * k < 1.0 - 1e-12 {
            d += 1;
        }
        let d = d.max(1);
        if d == 1 {
            return Self::from_coefficients(vec![1.0]);
        }
        let df = d as f64;
        let disc = ((df - 1.0) * (k * df - 1.0)).max(0.0);
        let p = (1.0 + disc.sqrt()) / df;
        let q = (1.0 - p) / (df - 1.0);
        let mut w = vec![q; d];
        w[0] = p;
        Self::from_coefficients(w.into_iter().map(f64::sqrt).collect())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn labels_a(&self) -> &[String] {
        &self.labels_a
    }

    pub fn labels_b(&self) -> &[String] {
        &self.labels_b
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    /// `sum φ⁴`
    pub fn k(&self) -> f64 {
        self.coefficients.iter().map(|c| c.powi(4)).sum()
    }

    /// Basis of the DOF: `labels_a` followed by any new labels from `labels_b`.
    pub fn dof_basis(&self) -> Vec<String> {
        let mut basis = self.labels_a.clone();
        for l in &self.labels_b {
            if !basis.contains(l) {
                basis.push(l.clone());
            }
        }
        basis
    }

    pub fn pair_kernel(&self) -> PairKernel {
        let basis = self.dof_basis();
        let idx = |l: &String| basis.iter().position(|b| b == l).expect("label in basis");
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for ((c, a), b) in self.coefficients.iter().zip(&self.labels_a).zip(&self.labels_b) {
            m[(idx(a), idx(b))] += Complex64::new(*c, 0.0);
        }
        PairKernel {
            labels: basis,
            matrix: m,
        }
    }
}

/// Joint amplitude of one DOF between the `u` photon (rows) and the `d`
/// photon (columns).
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub labels: Vec<String>,
    pub matrix: DMatrix<Complex64>,
}

impl PairKernel {
    /// `(|H>_u|V>_d - |V>_u|H>_d)/sqrt(2)`
    pub fn polarization_singlet() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::default();
        Self {
            labels: vec!["H".into(), "V".into()],
            matrix: DMatrix::from_row_slice(2, 2, &[z, h, -h, z]),
        }
    }

    /// `tr((K†K)²)`, which equals `sum φ⁴` for a normalized kernel.
    pub fn k(&self) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix;
        (&g * &g).trace().re
    }
}

pub fn pdc_registry(labels_a: &[String], labels_b: &[String]) -> Result<Arc<DofRegistry>> {
    DofRegistry::shared(vec![
        Dof::new(DOF_A, labels_a.iter().cloned()),
        Dof::new(DOF_B, labels_b.iter().cloned()),
        Dof::new(PATH_DOF, ["u", "d"]),
    ])
}

/// `sum K_A[a,b] K_B[α,β] a†(a,α,u) a†(b,β,d)`
pub fn pair_polynomial(reg: &Arc<DofRegistry>, ka: &PairKernel, kb: &PairKernel) -> CreationPolynomial {
    let mode = |a: usize, b: usize, p: usize| reg.mode_index(&reg.mode(&[a, b, p]).expect("valid indices")).unwrap();
    let mut poly = CreationPolynomial::linear(reg, []);
    let eb = nonzero_entries(&kb.matrix);
    for (a_u, a_d, ca) in nonzero_entries(&ka.matrix) {
        for &(b_u, b_d, cb) in &eb {
            poly.add_monomial(&[mode(a_u, b_u, 0), mode(a_d, b_d, 1)], ca * cb);
        }
    }
    poly
}

fn nonzero_entries(m: &DMatrix<Complex64>) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != Complex64::default() {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

pub fn two_photon_from_kernels(ka: &PairKernel, kb: &PairKernel) -> Result<FockState> {
    let reg = pdc_registry(&ka.labels, &kb.labels)?;
    pair_polynomial(&reg, ka, kb).to_state().normalize()
}

pub fn four_photon_from_kernels(ka: &PairKernel, kb: &PairKernel) -> Result<FockState> {
    let reg = pdc_registry(&ka.labels, &kb.labels)?;
    let p = pair_polynomial(&reg, ka, kb);
    p.mul(&p)?.to_state().normalize()
}

pub fn two_photon(spec_a: &SchmidtSpec, spec_b: &SchmidtSpec) -> Result<FockState> {
    two_photon_from_kernels(&spec_a.pair_kernel(), &spec_b.pair_kernel())
}

/// Normalized second-order PDC state: two photons in `u`, two in `d`.
pub fn four_photon(spec_a: &SchmidtSpec, spec_b: &SchmidtSpec) -> Result<FockState> {
    four_photon_from_kernels(&spec_a.pair_kernel(), &spec_b.pair_kernel())
}

/// Polarization singlet pairs dressed with a second DOF described by `spec_b`.
pub fn polarization_four_photon(spec_b: &SchmidtSpec) -> Result<FockState> {
    four_photon_from_kernels(&PairKernel::polarization_singlet(), &spec_b.pair_kernel())
}

/// Four-photon state as a slot ket over composite modes with slots `u, u, d, d`.
pub fn labeled_four_photon(state: &FockState) -> Result<SlotKet> {
    if state.photon_number() != Some(4) {
        return Err(Error::BadSector);
    }
    let path = state.registry().dof_index(PATH_DOF).map_err(|_| Error::NoPathDof)?;
    fock_to_sym(state)?.labeled_by(path, &UUDD)
}

/// Single-DOF factor states of the four-photon decomposition, as slot kets
/// over [`SchmidtSpec::dof_basis`] with slots `u, u, d, d`.
#[derive(Debug, Clone)]
pub struct FactorBasis {
    pub k: f64,
    /// Every photon pair in the same Schmidt mode.
    pub one: SlotKet,
    /// Pairs in two different Schmidt modes, symmetric within each path.
    pub two: Option<SlotKet>,
    /// Pairs in two different Schmidt modes, antisymmetric within each path.
    pub three: Option<SlotKet>,
    /// Normalized `sqrt(K) one + sqrt((1-K)/2) two`.
    pub one_two: SlotKet,
}

pub fn basis_states(spec: &SchmidtSpec) -> FactorBasis {
    let basis = spec.dof_basis();
    let idx = |l: &String| basis.iter().position(|b| b == l).expect("label in basis");
    let a: Vec<usize> = spec.labels_a.iter().map(idx).collect();
    let b: Vec<usize> = spec.labels_b.iter().map(idx).collect();
    let phi = &spec.coefficients;
    let k = spec.k();
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut one = SlotKet::new(basis.len());
    for i in 0..phi.len() {
        one.add_term(vec![a[i], a[i], b[i], b[i]], c(phi[i] * phi[i] / k.sqrt()));
    }
    let (two, three) = if phi.len() < 2 {
        (None, None)
    } else {
        let scale = 1.0 / ((1.0 - k) / 2.0).sqrt();
        let mut two = SlotKet::new(basis.len());
        let mut three = SlotKet::new(basis.len());
        for i in 0..phi.len() {
            for m in i + 1..phi.len() {
                let w = phi[i] * phi[m] * scale / 2.0;
                for (su, sd, sign) in [
                    ([a[i], a[m]], [b[i], b[m]], 1.0),
                    ([a[i], a[m]], [b[m], b[i]], -1.0),
                    ([a[m], a[i]], [b[i], b[m]], -1.0),
                    ([a[m], a[i]], [b[m], b[i]], 1.0),
                ] {
                    let t = vec![su[0], su[1], sd[0], sd[1]];
                    two.add_term(t.clone(), c(w));
                    three.add_term(t, c(w * sign));
                }
            }
        }
        (Some(two), Some(three))
    };
    let one_two = match &two {
        Some(t) => one
            .scale(c(k.sqrt()))
            .add(&t.scale(c(((1.0 - k) / 2.0).sqrt())))
            .scale(c(1.0 / ((1.0 + k) / 2.0).sqrt())),
        None => one.clone(),
    };
    FactorBasis {
        k,
        one,
        two,
        three,
        one_two,
    }
}

/// Coefficients of the four-photon state on the five product terms
/// `A1B1, A1B2, A2B1, A2B2, A3B3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPhotonDecomposition {
    pub k_a: f64,
    pub k_b: f64,
    pub coefficients: [f64; 5],
}

impl FourPhotonDecomposition {
    pub fn closed_form(k_a: f64, k_b: f64) -> Self {
        let n = ((1.0 + k_a * k_b) / 2.0).sqrt();
        let (ca, cb) = (1.0 - k_a, 1.0 - k_b);
        Self {
            k_a,
            k_b,
            coefficients: [
                (k_a * k_b).sqrt() / n,
                (k_a * cb / 2.0).sqrt() / n,
                (ca * k_b / 2.0).sqrt() / n,
                (ca * cb).sqrt() / 2.0 / n,
                (ca * cb / 4.0).sqrt() / n,
            ],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Projects a four-photon state (built on the registry of `spec_a`, `spec_b`)
/// onto the five product factor states. Missing factors give 0.
pub fn project_onto_factors(state: &FockState, spec_a: &SchmidtSpec, spec_b: &SchmidtSpec) -> Result<[Complex64; 5]> {
    let reg = state.registry();
    let (ia, ib) = (reg.dof_index(DOF_A)?, reg.dof_index(DOF_B)?);
    let ket = labeled_four_photon(state)?;
    let fa = basis_states(spec_a);
    let fb = basis_states(spec_b);
    let pairs: [(Option<&SlotKet>, Option<&SlotKet>); 5] = [
        (Some(&fa.one), Some(&fb.one)),
        (Some(&fa.one), fb.two.as_ref()),
        (fa.two.as_ref(), Some(&fb.one)),
        (fa.two.as_ref(), fb.two.as_ref()),
        (fa.three.as_ref(), fb.three.as_ref()),
    ];
    let mut out = [Complex64::default(); 5];
    for (slot, (x, y)) in pairs.iter().enumerate() {
        let (Some(x), Some(y)) = (x, y) else { continue };
        out[slot] = ket
            .iter()
            .map(|(t, amp)| {
                let ta: Vec<usize> = t.iter().map(|&m| reg.component(m, ia)).collect();
                let tb: Vec<usize> = t.iter().map(|&m| reg.component(m, ib)).collect();
                x.amplitude(&ta).conj() * y.amplitude(&tb).conj() * amp
            })
            .sum();
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PdcConfig {
    pub eta: Complex64,
    pub spec_a: SchmidtSpec,
    pub spec_b: SchmidtSpec,
    pub max_order: usize,
}

impl PdcConfig {
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.eta.norm_sqr() > 0.3 {
            w.push(format!(
                "|eta|^2 = {} is not small; the truncated series is inaccurate",
                self.eta.norm_sqr()
            ));
        }
        w
    }
}

/// `(1 - η²/2)|vac> + η|Φ2> + η²|Φ4>` truncated at `max_order` pairs. `|Φ4>`
/// is the bare `(1/2)(pair polynomial)²|vac>` with squared norm
/// `(1 + K_A K_B)/2`; nothing is renormalized.
pub fn pdc_series(config: &PdcConfig) -> Result<FockState> {
    if config.max_order > 2 {
        return Err(Error::InvalidSpec(format!("max_order {} exceeds 2", config.max_order)));
    }
    let (ka, kb) = (config.spec_a.pair_kernel(), config.spec_b.pair_kernel());
    let reg = pdc_registry(&ka.labels, &kb.labels)?;
    let eta = config.eta;
    let one = Complex64::new(1.0, 0.0);
    let mut state = FockState::vacuum(&reg).scale(one - eta * eta / 2.0);
    if config.max_order >= 1 {
        let p = pair_polynomial(&reg, &ka, &kb);
        state = state.add(&p.to_state().scale(eta))?;
        if config.max_order >= 2 {
            let four = p.mul(&p)?.scale(Complex64::new(0.5, 0.0)).to_state();
            state = state.add(&four.scale(eta * eta))?;
        }
    }
    Ok(state)
}

fn hv_basis() -> Vec<String> {
    vec!["H".into(), "V".into()]
}

/// `(|HH>_u|VV>_d - |HV>_u|HV>_d + |VV>_u|HH>_d)/sqrt(3)`, Fock kets within each path.
pub fn psi4() -> SlotKet {
    let (h, v) = (0, 1);
    let c = |x: f64| Complex64::new(x, 0.0);
    let s3 = 3f64.sqrt();
    let mut k = SlotKet::new(2);
    k.add_term(vec![h, h, v, v], c(1.0 / s3));
    k.add_term(vec![v, v, h, h], c(1.0 / s3));
    for u in [[h, v], [v, h]] {
        for d in [[h, v], [v, h]] {
            k.add_term(vec![u[0], u[1], d[0], d[1]], c(-0.5 / s3));
        }
    }
    k
}

/// `(|HV> - |VH>)_u (|HV> - |VH>)_d / 2`
pub fn phi4() -> SlotKet {
    let (h, v) = (0, 1);
    let mut k = SlotKet::new(2);
    for (u, su) in [([h, v], 1.0), ([v, h], -1.0)] {
        for (d, sd) in [([h, v], 1.0), ([v, h], -1.0)] {
            k.add_term(vec![u[0], u[1], d[0], d[1]], Complex64::new(su * sd / 2.0, 0.0));
        }
    }
    k
}

fn check_kb(k_b: f64) -> Result<()> {
    if (0.0..=1.0).contains(&k_b) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "K_B",
            value: k_b,
            domain: "[0, 1]",
        })
    }
}

/// `[3(1+K_B)|Ψ4><Ψ4| + (1-K_B)|Φ4><Φ4|] / (4 + 2K_B)` over polarization slot tuples.
pub fn polarization_mixture(k_b: f64) -> Result<DensityMatrix> {
    check_kb(k_b)?;
    let den = 4.0 + 2.0 * k_b;
    DensityMatrix::from_slot_mixture(
        &hv_basis(),
        &[(3.0 * (1.0 + k_b) / den, &psi4()), ((1.0 - k_b) / den, &phi4())],
    )
}

pub fn alpha_from_kb(k_b: f64) -> Result<f64> {
    check_kb(k_b)?;
    Ok(3.0 * k_b / (2.0 + k_b))
}
