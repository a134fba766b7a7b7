//! Composite-mode bookkeeping and second-quantized state algebra.
//!
//! A [`DofRegistry`] fixes an ordered list of degrees of freedom, each with a
//! finite labelled basis. A composite [`Mode`] assigns one basis index per
//! DOF; composite modes are numbered in row-major order (the last DOF varies
//! fastest). A [`FockState`] is a sparse map from dense occupation vectors to
//! complex amplitudes, stored against the normalized number basis
//! `|n> = (a†)^n / sqrt(n!) |vac>`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Complex amplitude. Always finite inside a [`FockState`].
pub type Amplitude = Complex64;

pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Prune tolerance used by freshly constructed states. Reads `MDP_PRUNE_TOL`
/// once; falls back to [`DEFAULT_PRUNE_TOL`] when unset or unparsable.
pub fn default_prune_tol() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var("MDP_PRUNE_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t >= 0.0)
            .unwrap_or(DEFAULT_PRUNE_TOL)
    })
}

/// `sqrt(n!)`, computed as a running product to stay exact for small n.
pub fn sqrt_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).sqrt()).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dof {
    pub name: String,
    pub basis: Vec<String>,
}

impl Dof {
    pub fn new<S: Into<String>, L: Into<String>>(name: S, basis: impl IntoIterator<Item = L>) -> Self {
        Self {
            name: name.into(),
            basis: basis.into_iter().map(Into::into).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|l| l == label)
    }
}

/// Ordered set of named degrees of freedom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofRegistry {
    dofs: Vec<Dof>,
    strides: Vec<usize>,
    mode_count: usize,
}

impl DofRegistry {
    pub fn new(dofs: Vec<Dof>) -> Result<Self> {
        if dofs.is_empty() {
            return Err(Error::InvalidRegistry("no degrees of freedom".into()));
        }
        for (i, dof) in dofs.iter().enumerate() {
            if dof.basis.is_empty() {
                return Err(Error::InvalidRegistry(format!(
                    "DOF \"{}\" has an empty basis",
                    dof.name
                )));
            }
            if dofs[..i].iter().any(|d| d.name == dof.name) {
                return Err(Error::InvalidRegistry(format!("duplicate DOF name \"{}\"", dof.name)));
            }
            for (j, label) in dof.basis.iter().enumerate() {
                if dof.basis[..j].contains(label) {
                    return Err(Error::InvalidRegistry(format!(
                        "duplicate label \"{label}\" in DOF \"{}\"",
                        dof.name
                    )));
                }
            }
        }
        let mut strides = vec![1; dofs.len()];
        for k in (0..dofs.len() - 1).rev() {
            strides[k] = strides[k + 1] * dofs[k + 1].dim();
        }
        let mode_count = strides[0] * dofs[0].dim();
        Ok(Self {
            dofs,
            strides,
            mode_count,
        })
    }

    /// Convenience constructor returning a shared handle.
    pub fn shared(dofs: Vec<Dof>) -> Result<Arc<Self>> {
        Self::new(dofs).map(Arc::new)
    }

    pub fn dofs(&self) -> &[Dof] {
        &self.dofs
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn dof_index(&self, name: &str) -> Result<usize> {
        self.dofs
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| Error::UnknownDof(name.to_string()))
    }

    pub fn dof(&self, name: &str) -> Result<&Dof> {
        self.dof_index(name).map(|k| &self.dofs[k])
    }

    pub fn mode(&self, indices: &[usize]) -> Result<Mode> {
        if indices.len() != self.dofs.len() {
            return Err(Error::InvalidMode(format!(
                "expected {} indices, got {}",
                self.dofs.len(),
                indices.len()
            )));
        }
        for (dof, &i) in self.dofs.iter().zip(indices) {
            if i >= dof.dim() {
                return Err(Error::InvalidMode(format!(
                    "index {i} out of range for DOF \"{}\" (dim {})",
                    dof.name,
                    dof.dim()
                )));
            }
        }
        Ok(Mode(indices.to_vec()))
    }

    /// Mode from one label per DOF, in registry order.
    pub fn mode_by_labels(&self, labels: &[&str]) -> Result<Mode> {
        if labels.len() != self.dofs.len() {
            return Err(Error::InvalidMode(format!(
                "expected {} labels, got {}",
                self.dofs.len(),
                labels.len()
            )));
        }
        let indices = self
            .dofs
            .iter()
            .zip(labels)
            .map(|(dof, l)| {
                dof.label_index(l)
                    .ok_or_else(|| Error::InvalidMode(format!("no label \"{l}\" in DOF \"{}\"", dof.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mode(indices))
    }

    pub fn mode_index(&self, mode: &Mode) -> Result<usize> {
        let mode = self.mode(&mode.0)?;
        Ok(mode.0.iter().zip(&self.strides).map(|(i, s)| i * s).sum())
    }

    pub fn mode_at(&self, index: usize) -> Mode {
        debug_assert!(index < self.mode_count);
        Mode(
            self.strides
                .iter()
                .zip(&self.dofs)
                .map(|(s, d)| (index / s) % d.dim())
                .collect(),
        )
    }

    /// Basis index of DOF `dof` in composite mode `index`.
    pub fn component(&self, index: usize, dof: usize) -> usize {
        (index / self.strides[dof]) % self.dofs[dof].dim()
    }

    /// Composite mode obtained by replacing the DOF-`dof` component of `index`.
    pub fn with_component(&self, index: usize, dof: usize, value: usize) -> usize {
        index - self.component(index, dof) * self.strides[dof] + value * self.strides[dof]
    }

    pub fn mode_label(&self, index: usize) -> String {
        self.dofs
            .iter()
            .enumerate()
            .map(|(k, d)| d.basis[self.component(index, k)].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl Serialize for DofRegistry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.dofs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DofRegistry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dofs = Vec::<Dof>::deserialize(d)?;
        DofRegistry::new(dofs).map_err(serde::de::Error::custom)
    }
}

/// Full assignment of one basis index per registered DOF.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub Vec<usize>);

/// Photon count per composite mode, dense over the registry's modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(pub Vec<u8>);

impl Occupation {
    pub fn zeros(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// `sqrt(prod_k n_k!)`
    pub fn sqrt_multiplicity(&self) -> f64 {
        self.0.iter().map(|&n| sqrt_factorial(n as usize)).product()
    }

    /// Occupied modes with repetition, in ascending mode order.
    pub fn photons(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| std::iter::repeat_n(k, n as usize))
            .collect()
    }

    pub fn from_photons(modes: usize, photons: &[usize]) -> Self {
        let mut occ = Self::zeros(modes);
        for &k in photons {
            occ.0[k] += 1;
        }
        occ
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

fn same_registry(a: &Arc<DofRegistry>, b: &Arc<DofRegistry>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sparse second-quantized state.
#[derive(Debug, Clone)]
pub struct FockState {
    registry: Arc<DofRegistry>,
    amps: BTreeMap<Occupation, Amplitude>,
    prune_tol: f64,
}

impl FockState {
    pub fn zero(registry: &Arc<DofRegistry>) -> Self {
        Self {
            registry: Arc::clone(registry),
            amps: BTreeMap::new(),
            prune_tol: default_prune_tol(),
        }
    }

    pub fn vacuum(registry: &Arc<DofRegistry>) -> Self {
        let mut state = Self::zero(registry);
        state
            .amps
            .insert(Occupation::zeros(registry.mode_count()), Complex64::new(1.0, 0.0));
        state
    }

    /// Builds a state from explicit entries; repeated occupations are summed.
    pub fn from_entries(
        registry: &Arc<DofRegistry>,
        entries: impl IntoIterator<Item = (Occupation, Amplitude)>,
    ) -> Result<Self> {
        let mut state = Self::zero(registry);
        for (occ, amp) in entries {
            if occ.0.len() != registry.mode_count() {
                return Err(Error::InvalidMode(format!(
                    "occupation has {} entries, registry has {} modes",
                    occ.0.len(),
                    registry.mode_count()
                )));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite);
            }
            *state.amps.entry(occ).or_default() += amp;
        }
        state.prune();
        Ok(state)
    }

    pub fn with_prune_tol(mut self, tol: f64) -> Self {
        self.prune_tol = tol;
        self.prune();
        self
    }

    pub fn prune_tol(&self) -> f64 {
        self.prune_tol
    }

    fn prune(&mut self) {
        let tol = self.prune_tol;
        self.amps.retain(|_, a| a.norm() >= tol);
    }

    pub fn registry(&self) -> &Arc<DofRegistry> {
        &self.registry
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Amplitude)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Amplitude {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    /// Total photon number if every entry has the same one.
    pub fn photon_number(&self) -> Option<usize> {
        let mut totals = self.amps.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn ladder(&self, mode: &Mode, raise: bool) -> Result<Self> {
        let k = self.registry.mode_index(mode)?;
        let mut out = Self {
            registry: Arc::clone(&self.registry),
            amps: BTreeMap::new(),
            prune_tol: self.prune_tol,
        };
        for (occ, &amp) in &self.amps {
            let n = occ.0[k];
            let mut next = occ.clone();
            let factor = if raise {
                next.0[k] = n
                    .checked_add(1)
                    .ok_or_else(|| Error::InvalidMode("occupation overflow".into()))?;
                (n as f64 + 1.0).sqrt()
            } else {
                if n == 0 {
                    continue;
                }
                next.0[k] = n - 1;
                (n as f64).sqrt()
            };
            *out.amps.entry(next).or_default() += amp * factor;
        }
        out.prune();
        Ok(out)
    }

    /// `a†_mode |psi>`; each `|n>` maps to `sqrt(n_mode + 1) |n + 1_mode>`.
    pub fn apply_creation(&self, mode: &Mode) -> Result<Self> {
        self.ladder(mode, true)
    }

    /// `a_mode |psi>`; entries with `n_mode = 0` vanish.
    pub fn apply_annihilation(&self, mode: &Mode) -> Result<Self> {
        self.ladder(mode, false)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Amplitude> {
        if !same_registry(&self.registry, &other.registry) {
            return Err(Error::RegistryMismatch);
        }
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.amps {
            if let Some(b) = large.amps.get(occ) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Amplitude) -> Self {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= c;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_registry(&self.registry, &other.registry) {
            return Err(Error::RegistryMismatch);
        }
        let mut out = self.clone();
        for (occ, a) in &other.amps {
            *out.amps.entry(occ.clone()).or_default() += a;
        }
        out.prune();
        Ok(out)
    }

    /// Probability mass grouped by a key computed from each occupation.
    pub fn distribution_by<K: Ord>(&self, mut key: impl FnMut(&Occupation) -> K) -> BTreeMap<K, f64> {
        let mut out = BTreeMap::new();
        for (occ, a) in &self.amps {
            *out.entry(key(occ)).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// Number of photons whose composite mode has `label` in DOF `dof`.
    pub fn count_in(&self, occ: &Occupation, dof: usize, label: usize) -> usize {
        occ.0
            .iter()
            .enumerate()
            .filter(|(k, _)| self.registry.component(*k, dof) == label)
            .map(|(_, &n)| n as usize)
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct AmpEntry {
    occ: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct FockStateJson {
    registry: DofRegistry,
    amplitudes: Vec<AmpEntry>,
}

impl Serialize for FockState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FockStateJson {
            registry: (*self.registry).clone(),
            amplitudes: self
                .amps
                .iter()
                .map(|(occ, a)| AmpEntry {
                    occ: occ.0.iter().map(|&n| n as u32).collect(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FockStateJson::deserialize(d)?;
        let registry = Arc::new(raw.registry);
        let entries = raw
            .amplitudes
            .into_iter()
            .map(|e| {
                let occ = e
                    .occ
                    .into_iter()
                    .map(|n| u8::try_from(n).map_err(|_| serde::de::Error::custom("occupation exceeds 255")))
                    .collect::<std::result::Result<Vec<u8>, D::Error>>()?;
                Ok((Occupation(occ), Complex64::new(e.re, e.im)))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        FockState::from_entries(&registry, entries).map_err(serde::de::Error::custom)
    }
}

/// Polynomial in commuting creation operators, keyed by exponent vector.
///
/// `to_state` applies the polynomial to the vacuum, so the monomial
/// `prod_k (a†_k)^{n_k}` lands on `sqrt(prod n_k!) |n>`.
#[derive(Debug, Clone)]
pub struct CreationPolynomial {
    registry: Arc<DofRegistry>,
    terms: BTreeMap<Occupation, Complex64>,
}

impl CreationPolynomial {
    pub fn one(registry: &Arc<DofRegistry>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::zeros(registry.mode_count()), Complex64::new(1.0, 0.0));
        Self {
            registry: Arc::clone(registry),
            terms,
        }
    }

    /// `sum_k c_k a†_k`
    pub fn linear(registry: &Arc<DofRegistry>, coeffs: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in coeffs {
            assert!(k < registry.mode_count(), "mode index out of range");
            *terms
                .entry(Occupation::from_photons(registry.mode_count(), &[k]))
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self {
            registry: Arc::clone(registry),
            terms,
        }
    }

    /// Adds `c * prod_{k in photons} a†_k`.
    pub fn add_monomial(&mut self, photons: &[usize], c: Complex64) {
        let occ = Occupation::from_photons(self.registry.mode_count(), photons);
        *self.terms.entry(occ).or_default() += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn from_state(state: &FockState) -> Self {
        Self {
            registry: Arc::clone(&state.registry),
            terms: state
                .amps
                .iter()
                .map(|(occ, a)| (occ.clone(), a / occ.sqrt_multiplicity()))
                .collect(),
        }
    }

    pub fn to_state(&self) -> FockState {
        let mut state = FockState::zero(&self.registry);
        for (occ, c) in &self.terms {
            *state.amps.entry(occ.clone()).or_default() += c * occ.sqrt_multiplicity();
        }
        state.prune();
        state
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !same_registry(&self.registry, &other.registry) {
            return Err(Error::RegistryMismatch);
        }
        let mut terms: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (oa, ca) in &self.terms {
            for (ob, cb) in &other.terms {
                let occ = Occupation(oa.0.iter().zip(&ob.0).map(|(x, y)| x + y).collect());
                *terms.entry(occ).or_default() += ca * cb;
            }
        }
        Ok(Self {
            registry: Arc::clone(&self.registry),
            terms,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            registry: Arc::clone(&self.registry),
            terms: self.terms.iter().map(|(o, t)| (o.clone(), t * c)).collect(),
        }
    }

    /// Substitutes `a†_k -> sum_j m[(j, k)] a†_j` and re-collects terms.
    /// Modes are expanded one photon at a time in ascending mode order.
    pub fn substitute(&self, m: &DMatrix<Complex64>) -> Result<Self> {
        let modes = self.registry.mode_count();
        if m.nrows() != modes || m.ncols() != modes {
            return Err(Error::DimensionMismatch {
                expected: modes,
                got: m.nrows().max(m.ncols()),
            });
        }
        let columns: Vec<Vec<(usize, Complex64)>> = (0..modes)
            .map(|k| {
                (0..modes)
                    .filter(|&j| m[(j, k)] != Complex64::default())
                    .map(|j| (j, m[(j, k)]))
                    .collect()
            })
            .collect();
        let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, &coef) in &self.terms {
            let mut partial: BTreeMap<Occupation, Complex64> = BTreeMap::new();
            partial.insert(Occupation::zeros(modes), coef);
            for k in occ.photons() {
                let mut next: BTreeMap<Occupation, Complex64> = BTreeMap::new();
                for (p, c) in &partial {
                    for &(j, u) in &columns[k] {
                        let mut q = p.clone();
                        q.0[j] += 1;
                        *next.entry(q).or_default() += c * u;
                    }
                }
                partial = next;
            }
            for (p, c) in partial {
                *out.entry(p).or_default() += c;
            }
        }
        Ok(Self {
            registry: Arc::clone(&self.registry),
            terms: out,
        })
    }
}
