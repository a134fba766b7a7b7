//! Shared fixtures for the benchmarks.

use mdp_core::SchmidtSpec;

/// Spec pairs of increasing size used across benchmark groups.
pub fn spec_ladder() -> Vec<(usize, SchmidtSpec)> {
    (1..=4)
        .map(|d| (d, SchmidtSpec::uniform(d).expect("uniform spec")))
        .collect()
}
