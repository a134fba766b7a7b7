//! First-quantized representation.
//!
//! An N-photon state is stored as an explicit map from ordered N-tuples of
//! composite modes to amplitudes. Every ordering of a tuple is stored, so a
//! bosonic tensor is visibly invariant under slot permutations. The map to
//! and from [`FockState`] is unitary:
//! `t(tuple) = c_n * sqrt(prod_k n_k!) / sqrt(N!)` for each distinct ordering
//! of the occupation `n`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{sqrt_factorial, Amplitude, DofRegistry, FockState, Occupation};

/// Symmetry tolerance for externally supplied tensors.
pub const INPUT_SYMMETRY_TOL: f64 = 1e-9;
/// Largest `modes^N` handled with a dense array in [`SymTensor::apply_per_slot`].
const DENSE_LIMIT: usize = 1 << 22;
/// Symmetry tolerance for tensors produced by this crate.
pub const INTERNAL_SYMMETRY_TOL: f64 = 1e-12;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

/// Advances `v` to the next lexicographic permutation; false when `v` was the last.
/// Duplicates are skipped, so iterating from a sorted multiset yields each
/// distinct ordering once.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Distinct orderings of a multiset.
pub fn distinct_orderings(items: &[usize]) -> Vec<Vec<usize>> {
    let mut current = items.to_vec();
    current.sort_unstable();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Permutation-symmetric N-photon amplitude tensor over composite modes.
#[derive(Debug, Clone)]
pub struct SymTensor {
    registry: Arc<DofRegistry>,
    photons: usize,
    amps: BTreeMap<Vec<usize>, Amplitude>,
}

impl SymTensor {
    /// Raw constructor. Symmetry is not enforced here; [`sym_to_fock`] checks it.
    pub fn from_entries(
        registry: &Arc<DofRegistry>,
        photons: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Amplitude)>,
    ) -> Result<Self> {
        if photons == 0 {
            return Err(Error::BadPhotonNumber {
                expected: "at least one photon".into(),
                got: "0".into(),
            });
        }
        let mut amps = BTreeMap::new();
        for (tuple, a) in entries {
            if tuple.len() != photons || tuple.iter().any(|&k| k >= registry.mode_count()) {
                return Err(Error::InvalidMode(format!("bad tuple {tuple:?}")));
            }
            *amps.entry(tuple).or_insert(Complex64::default()) += a;
        }
        amps.retain(|_, a: &mut Complex64| a.norm() > 0.0);
        Ok(Self {
            registry: Arc::clone(registry),
            photons,
            amps,
        })
    }

    pub fn registry(&self) -> &Arc<DofRegistry> {
        &self.registry
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Amplitude)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Amplitude {
        self.amps.get(tuple).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner_product(&self, other: &Self) -> Result<Amplitude> {
        if *self.registry != *other.registry || self.photons != other.photons {
            return Err(Error::RegistryMismatch);
        }
        Ok(self
            .amps
            .iter()
            .filter_map(|(t, a)| other.amps.get(t).map(|b| a.conj() * b))
            .sum())
    }

    /// Largest deviation between an amplitude and the mean over its orbit.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut worst: f64 = 0.0;
        for tuple in self.amps.keys() {
            let mut key = tuple.clone();
            key.sort_unstable();
            if !seen.insert(key.clone()) {
                continue;
            }
            let orbit = distinct_orderings(&key);
            let values: Vec<Complex64> = orbit.iter().map(|t| self.amplitude(t)).collect();
            let mean = values.iter().sum::<Complex64>() / values.len() as f64;
            for v in values {
                worst = worst.max((v - mean).norm());
            }
        }
        worst
    }

    /// Applies `m` to every slot independently (`m^{⊗N}`).
    pub fn apply_per_slot(&self, m: &DMatrix<Complex64>) -> Result<Self> {
        let modes = self.registry.mode_count();
        if m.nrows() != modes || m.ncols() != modes {
            return Err(Error::DimensionMismatch {
                expected: modes,
                got: m.nrows(),
            });
        }
        let mut out = match modes.checked_pow(self.photons as u32) {
            Some(size) if size <= DENSE_LIMIT => self.per_slot_dense(m, size),
            _ => self.per_slot_sparse(m),
        };
        out.retain(|_, a| a.norm() > 0.0);
        Ok(Self {
            registry: Arc::clone(&self.registry),
            photons: self.photons,
            amps: out,
        })
    }

    /// One slot at a time on a dense `modes^N` array.
    fn per_slot_dense(&self, m: &DMatrix<Complex64>, size: usize) -> BTreeMap<Vec<usize>, Complex64> {
        let modes = m.nrows();
        let flat = |t: &[usize]| t.iter().fold(0, |acc, &k| acc * modes + k);
        let mut cur = vec![Complex64::default(); size];
        for (t, a) in &self.amps {
            cur[flat(t)] = *a;
        }
        let mut stride = size;
        for _ in 0..self.photons {
            stride /= modes;
            let mut next = vec![Complex64::default(); size];
            for (idx, &a) in cur.iter().enumerate() {
                if a == Complex64::default() {
                    continue;
                }
                let k = (idx / stride) % modes;
                let base = idx - k * stride;
                for j in 0..modes {
                    next[base + j * stride] += m[(j, k)] * a;
                }
            }
            cur = next;
        }
        let mut out = BTreeMap::new();
        for (idx, a) in cur.into_iter().enumerate() {
            if a != Complex64::default() {
                let mut t = vec![0; self.photons];
                let mut rest = idx;
                for slot in (0..self.photons).rev() {
                    t[slot] = rest % modes;
                    rest /= modes;
                }
                out.insert(t, a);
            }
        }
        out
    }

    fn per_slot_sparse(&self, m: &DMatrix<Complex64>) -> BTreeMap<Vec<usize>, Complex64> {
        let modes = m.nrows();
        let mut out: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (tuple, &amp) in &self.amps {
            let mut partial: Vec<(Vec<usize>, Complex64)> = vec![(Vec::with_capacity(self.photons), amp)];
            for &k in tuple {
                let mut next = Vec::with_capacity(partial.len() * modes);
                for (prefix, c) in &partial {
                    for j in 0..modes {
                        let u = m[(j, k)];
                        if u != Complex64::default() {
                            let mut t = prefix.clone();
                            t.push(j);
                            next.push((t, c * u));
                        }
                    }
                }
                partial = next;
            }
            for (t, c) in partial {
                *out.entry(t).or_default() += c;
            }
        }
        out
    }

    /// Restricts to tuples whose DOF-`dof` components follow `pattern` slot by
    /// slot, rescaled so the result carries the full norm. Valid when every
    /// tuple's DOF-`dof` multiset equals that of `pattern` (e.g. u,u,d,d).
    pub fn labeled_by(&self, dof: usize, pattern: &[usize]) -> Result<SlotKet> {
        if pattern.len() != self.photons {
            return Err(Error::BadSector);
        }
        let mut want = pattern.to_vec();
        want.sort_unstable();
        let mut counts = BTreeMap::new();
        for &p in pattern {
            *counts.entry(p).or_insert(0usize) += 1;
        }
        let orderings = factorial(self.photons) / counts.values().map(|&c| factorial(c)).product::<f64>();
        let scale = orderings.sqrt();
        let mut amps = BTreeMap::new();
        for (tuple, a) in &self.amps {
            let labels: Vec<usize> = tuple.iter().map(|&k| self.registry.component(k, dof)).collect();
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            if sorted != want {
                return Err(Error::BadSector);
            }
            if labels == pattern {
                amps.insert(tuple.clone(), a * scale);
            }
        }
        Ok(SlotKet {
            dim: self.registry.mode_count(),
            amps,
        })
    }
}

impl Serialize for SymTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            tuple: &'a [usize],
            re: f64,
            im: f64,
        }
        #[derive(Serialize)]
        struct Json<'a> {
            registry: &'a DofRegistry,
            photons: usize,
            amplitudes: Vec<Entry<'a>>,
        }
        Json {
            registry: &self.registry,
            photons: self.photons,
            amplitudes: self
                .amps
                .iter()
                .map(|(t, a)| Entry {
                    tuple: t,
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// `(1/sqrt(N!)) sum_P P(|a_1>...|a_N>)` for single-photon kets over composite modes.
pub fn symmetrize_product(registry: &Arc<DofRegistry>, kets: &[Vec<Complex64>]) -> Result<SymTensor> {
    let n = kets.len();
    if n == 0 {
        return Err(Error::BadPhotonNumber {
            expected: "at least one ket".into(),
            got: "0".into(),
        });
    }
    let modes = registry.mode_count();
    for (i, ket) in kets.iter().enumerate() {
        if ket.len() != modes {
            return Err(Error::DimensionMismatch {
                expected: modes,
                got: ket.len(),
            });
        }
        if ket.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroKet(i));
        }
    }
    let support: Vec<usize> = (0..modes)
        .filter(|&k| kets.iter().any(|ket| ket[k].norm() > 0.0))
        .collect();
    let perms = permutations(n);
    let weight = 1.0 / factorial(n).sqrt();
    let mut amps = BTreeMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let tuple: Vec<usize> = idx.iter().map(|&i| support[i]).collect();
        let value: Complex64 = perms
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(slot, &which)| kets[which][tuple[slot]])
                    .product::<Complex64>()
            })
            .sum();
        if value.norm() > 0.0 {
            amps.insert(tuple, value * weight);
        }
        // odometer over support^n
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(SymTensor {
                    registry: Arc::clone(registry),
                    photons: n,
                    amps,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < support.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn fock_to_sym(state: &FockState) -> Result<SymTensor> {
    let n = state.photon_number().ok_or(Error::MixedPhotonNumber)?;
    if n == 0 {
        return Err(Error::BadPhotonNumber {
            expected: "at least one photon".into(),
            got: "0".into(),
        });
    }
    let norm_n = sqrt_factorial(n);
    let mut amps = BTreeMap::new();
    for (occ, c) in state.iter() {
        let t = c * occ.sqrt_multiplicity() / norm_n;
        for ordering in distinct_orderings(&occ.photons()) {
            amps.insert(ordering, t);
        }
    }
    Ok(SymTensor {
        registry: Arc::clone(state.registry()),
        photons: n,
        amps,
    })
}

pub fn sym_to_fock(tensor: &SymTensor) -> Result<FockState> {
    sym_to_fock_with_tol(tensor, INPUT_SYMMETRY_TOL)
}

pub fn sym_to_fock_with_tol(tensor: &SymTensor, tol: f64) -> Result<FockState> {
    let modes = tensor.registry.mode_count();
    let norm_n = sqrt_factorial(tensor.photons);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut entries = Vec::new();
    for tuple in tensor.amps.keys() {
        let mut key = tuple.clone();
        key.sort_unstable();
        if !seen.insert(key.clone()) {
            continue;
        }
        let orbit = distinct_orderings(&key);
        let values: Vec<Complex64> = orbit.iter().map(|t| tensor.amplitude(t)).collect();
        let mean = values.iter().sum::<Complex64>() / values.len() as f64;
        let dev = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::NotSymmetric(dev));
        }
        let occ = Occupation::from_photons(modes, &key);
        let c = mean * norm_n / occ.sqrt_multiplicity();
        entries.push((occ, c));
    }
    FockState::from_entries(&tensor.registry, entries)
}

/// Splits a two-photon kernel into `(phi + phiᵀ)/2` and `(phi - phiᵀ)/2`.
pub fn symmetry_split(phi: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if !phi.is_square() {
        return Err(Error::NonSquare {
            rows: phi.nrows(),
            cols: phi.ncols(),
        });
    }
    let t = phi.transpose();
    let half = Complex64::new(0.5, 0.0);
    Ok(((phi + &t) * half, (phi - &t) * half))
}

/// Slot-labelled ket: amplitudes over ordered tuples of single-slot basis
/// indices, with no symmetry requirement across slots. Used once photons are
/// distinguished by path, and for single-DOF factor states.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotKet {
    dim: usize,
    amps: BTreeMap<Vec<usize>, Complex64>,
}

impl SlotKet {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            amps: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, tuple: Vec<usize>, c: Complex64) {
        debug_assert!(tuple.iter().all(|&i| i < self.dim));
        *self.amps.entry(tuple).or_default() += c;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Complex64 {
        self.amps.get(tuple).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner_product(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .filter_map(|(t, a)| other.amps.get(t).map(|b| a.conj() * b))
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            amps: self.amps.iter().map(|(t, a)| (t.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, a) in &other.amps {
            out.add_term(t.clone(), *a);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Dof;
    use approx::assert_abs_diff_eq;

    fn reg(n: usize) -> Arc<DofRegistry> {
        DofRegistry::shared(vec![Dof::new("m", (0..n).map(|i| i.to_string()))]).unwrap()
    }

    fn basis(modes: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); modes];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn permutation_helpers() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(distinct_orderings(&[1, 0, 1]).len(), 3);
        assert_eq!(distinct_orderings(&[2, 2]), vec![vec![2, 2]]);
    }

    #[test]
    fn orthogonal_pair() {
        let r = reg(2);
        let t = symmetrize_product(&r, &[basis(2, 0), basis(2, 1)]).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(t.amplitude(&[0, 1]).re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(t.amplitude(&[1, 0]).re, h, epsilon = 1e-15);
    }

    #[test]
    fn three_distinct_modes() {
        let r = reg(3);
        let t = symmetrize_product(&r, &[basis(3, 0), basis(3, 1), basis(3, 2)]).unwrap();
        assert_eq!(t.len(), 6);
        for p in permutations(3) {
            assert_abs_diff_eq!(t.amplitude(&p).re, 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn identical_kets_bunch() {
        let r = reg(2);
        let t = symmetrize_product(&r, &[basis(2, 1), basis(2, 1)]).unwrap();
        let f = sym_to_fock(&t).unwrap();
        assert_abs_diff_eq!(f.amplitude(&Occupation(vec![0, 2])).re, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zero_ket_rejected() {
        let r = reg(2);
        let z = vec![Complex64::default(); 2];
        assert_eq!(
            symmetrize_product(&r, &[basis(2, 0), z]).unwrap_err(),
            Error::ZeroKet(1)
        );
    }

    #[test]
    fn fock_to_sym_examples() {
        let r = reg(2);
        let one_one = FockState::from_entries(&r, [(Occupation(vec![1, 1]), Complex64::new(1.0, 0.0))]).unwrap();
        let t = fock_to_sym(&one_one).unwrap();
        assert_abs_diff_eq!(t.amplitude(&[0, 1]).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.amplitude(&[1, 0]).re, 0.5f64.sqrt(), epsilon = 1e-15);
        let two = FockState::from_entries(&r, [(Occupation(vec![2, 0]), Complex64::new(1.0, 0.0))]).unwrap();
        let t2 = fock_to_sym(&two).unwrap();
        assert_eq!(t2.len(), 1);
        assert_abs_diff_eq!(t2.amplitude(&[0, 0]).re, 1.0, epsilon = 1e-15);
        let back = sym_to_fock(&t2).unwrap();
        assert_abs_diff_eq!(back.amplitude(&Occupation(vec![2, 0])).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mixed_photon_number_rejected() {
        let r = reg(2);
        let s = FockState::from_entries(
            &r,
            [
                (Occupation(vec![1, 0]), Complex64::new(1.0, 0.0)),
                (Occupation(vec![1, 1]), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(fock_to_sym(&s).unwrap_err(), Error::MixedPhotonNumber);
    }

    #[test]
    fn antisymmetric_tensor_rejected() {
        let r = reg(2);
        let h = 0.5f64.sqrt();
        let t = SymTensor::from_entries(
            &r,
            2,
            [
                (vec![0, 1], Complex64::new(h, 0.0)),
                (vec![1, 0], Complex64::new(-h, 0.0)),
            ],
        )
        .unwrap();
        assert!(matches!(sym_to_fock(&t), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn split_examples() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let singlet = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        let (s, a) = symmetry_split(&singlet).unwrap();
        assert_abs_diff_eq!(s.norm(), 0.0);
        assert_abs_diff_eq!((a - &singlet).norm(), 0.0);
        let (_, a) = symmetry_split(&DMatrix::identity(3, 3)).unwrap();
        assert_abs_diff_eq!(a.norm(), 0.0);
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert_eq!(
            symmetry_split(&rect).unwrap_err(),
            Error::NonSquare { rows: 2, cols: 3 }
        );
    }

    #[test]
    fn dense_and_sparse_per_slot_agree() {
        let r = reg(3);
        let m = DMatrix::from_fn(3, 3, |i, j| {
            Complex64::new((i * 3 + j) as f64 * 0.1, (i as f64) - (j as f64))
        });
        let t = symmetrize_product(
            &r,
            &[
                vec![
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.5, 0.0),
                    Complex64::new(0.0, 0.2),
                ],
                vec![
                    Complex64::new(0.0, 1.0),
                    Complex64::new(0.3, 0.0),
                    Complex64::new(-0.4, 0.0),
                ],
                vec![
                    Complex64::new(0.2, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ],
            ],
        )
        .unwrap();
        let dense = t.per_slot_dense(&m, 27);
        let sparse = t.per_slot_sparse(&m);
        for (k, v) in &sparse {
            assert_abs_diff_eq!(
                (dense.get(k).copied().unwrap_or_default() - v).norm(),
                0.0,
                epsilon = 1e-14
            );
        }
        assert!(dense.len() <= sparse.len());
    }
}
