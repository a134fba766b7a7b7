//! Seeded random inputs for sweeps and self-tests.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fock::{DofRegistry, FockState, Occupation};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Normalized random state with exactly `photons` photons spread over
/// `terms` random occupations.
pub fn random_fock_state<R: Rng + ?Sized>(
    registry: &Arc<DofRegistry>,
    photons: usize,
    terms: usize,
    rng: &mut R,
) -> FockState {
    let modes = registry.mode_count();
    let entries = (0..terms.max(1)).map(|_| {
        let picks: Vec<usize> = (0..photons).map(|_| rng.random_range(0..modes)).collect();
        (Occupation::from_photons(modes, &picks), complex_gaussian(rng))
    });
    let state = FockState::from_entries(registry, entries.collect::<Vec<_>>()).expect("entries are valid");
    state.normalize().expect("random state is nonzero with probability one")
}

/// Positive coefficients with unit 2-norm.
pub fn random_schmidt_coefficients<R: Rng + ?Sized>(terms: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| x / n).collect()
}
