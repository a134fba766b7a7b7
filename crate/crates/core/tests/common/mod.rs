#![allow(dead_code)]

use std::sync::Arc;

use mdp_core::random::random_schmidt_coefficients;
use mdp_core::{Dof, DofRegistry, SchmidtSpec};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two DOFs, sizes chosen by the caller.
pub fn registry(dims: &[usize]) -> Arc<DofRegistry> {
    DofRegistry::shared(
        dims.iter()
            .enumerate()
            .map(|(i, &d)| Dof::new(format!("x{i}"), (0..d).map(|k| k.to_string())))
            .collect(),
    )
    .unwrap()
}

pub fn random_spec(terms: usize, rng: &mut ChaCha8Rng) -> SchmidtSpec {
    SchmidtSpec::from_coefficients(random_schmidt_coefficients(terms, rng)).unwrap()
}
