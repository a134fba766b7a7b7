mod common;

use common::{c, registry, rng};
use mdp_core::fock::sqrt_factorial;
use mdp_core::random::{random_fock_state, random_unitary};
use mdp_core::symmetrizer::{fock_to_sym, sym_to_fock};
use mdp_core::{FockState, ModeUnitary, Occupation};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn creation_is_adjoint_of_annihilation(seed in any::<u64>(), n in 0usize..4) {
        let reg = registry(&[2, 2]);
        let mut r = rng(seed);
        let phi = random_fock_state(&reg, n + 1, 4, &mut r);
        let psi = random_fock_state(&reg, n, 4, &mut r);
        for k in 0..reg.mode_count() {
            let m = reg.mode_at(k);
            let lhs = phi.inner_product(&psi.apply_creation(&m).unwrap()).unwrap();
            let rhs = phi.apply_annihilation(&m).unwrap().inner_product(&psi).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_commutator(seed in any::<u64>(), n in 0usize..4) {
        let reg = registry(&[3]);
        let mut r = rng(seed);
        let psi = random_fock_state(&reg, n, 3, &mut r);
        for j in 0..3 {
            for k in 0..3 {
                let (mj, mk) = (reg.mode_at(j), reg.mode_at(k));
                let ab = psi.apply_creation(&mk).unwrap().apply_annihilation(&mj).unwrap();
                let ba = psi.apply_annihilation(&mj).unwrap().apply_creation(&mk).unwrap();
                let comm = ab.add(&ba.scale(c(-1.0))).unwrap();
                let expect = if j == k { psi.clone() } else { FockState::zero(&reg) };
                let diff = comm.add(&expect.scale(c(-1.0))).unwrap();
                prop_assert!(diff.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_schwarz(seed in any::<u64>(), n in 1usize..4) {
        let reg = registry(&[2, 2]);
        let mut r = rng(seed);
        let a = random_fock_state(&reg, n, 5, &mut r).scale(c(r.random_range(0.1..3.0)));
        let b = random_fock_state(&reg, n, 5, &mut r);
        prop_assert!(a.inner_product(&b).unwrap().norm() <= a.norm() * b.norm() + 1e-12);
    }

    #[test]
    fn slot_map_is_unitary(seed in any::<u64>(), n in 1usize..5) {
        let reg = registry(&[2, 2]);
        let mut r = rng(seed);
        let a = random_fock_state(&reg, n, 6, &mut r);
        let b = random_fock_state(&reg, n, 6, &mut r);
        let (sa, sb) = (fock_to_sym(&a).unwrap(), fock_to_sym(&b).unwrap());
        prop_assert!((sa.inner_product(&sb).unwrap() - a.inner_product(&b).unwrap()).norm() < 1e-12);
        prop_assert!(sa.symmetry_deviation() < 1e-12);
        let back = sym_to_fock(&sa).unwrap();
        prop_assert!(back.add(&a.scale(c(-1.0))).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gate_matches_slot_oracle(seed in any::<u64>(), n in 1usize..5) {
        let reg = registry(&[2, 2]);
        let mut r = rng(seed);
        let u = random_unitary(reg.mode_count(), &mut r);
        let g = ModeUnitary::from_mode_matrix(&reg, u.clone()).unwrap();
        let psi = random_fock_state(&reg, n, 4, &mut r);
        let second = fock_to_sym(&g.apply(&psi).unwrap()).unwrap();
        let first = fock_to_sym(&psi).unwrap().apply_per_slot(&u).unwrap();
        let worst = first
            .iter()
            .chain(second.iter())
            .map(|(t, _)| (first.amplitude(t) - second.amplitude(t)).norm())
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn gates_preserve_norm_and_compose(seed in any::<u64>(), n in 1usize..4) {
        let reg = registry(&[2, 2]);
        let mut r = rng(seed);
        let g1 = ModeUnitary::dof_unitary(&reg, "x0", &random_unitary(2, &mut r)).unwrap();
        let g2 = ModeUnitary::dof_unitary(&reg, "x1", &random_unitary(2, &mut r)).unwrap();
        let psi = random_fock_state(&reg, n, 4, &mut r);
        let seq = g1.apply(&g2.apply(&psi).unwrap()).unwrap();
        prop_assert!((seq.norm() - 1.0).abs() < 1e-12);
        let both = g1.compose(&g2).unwrap().apply(&psi).unwrap();
        prop_assert!(both.add(&seq.scale(c(-1.0))).unwrap().norm() < 1e-12);
        let back = g1.adjoint().apply(&g1.apply(&psi).unwrap()).unwrap();
        prop_assert!(back.add(&psi.scale(c(-1.0))).unwrap().norm() < 1e-12);
    }
}

#[test]
fn repeated_creation_bunches() {
    let reg = registry(&[2]);
    let m = reg.mode_at(0);
    let mut s = FockState::vacuum(&reg);
    for n in 1..=6usize {
        s = s.apply_creation(&m).unwrap();
        let amp = s.amplitude(&Occupation(vec![n as u8, 0]));
        assert!((amp.re - sqrt_factorial(n)).abs() < 1e-12);
        assert_eq!(s.len(), 1);
    }
}

#[test]
fn identity_gate_is_noop() {
    let reg = registry(&[3]);
    let psi = random_fock_state(&reg, 3, 5, &mut rng(7));
    let out = ModeUnitary::from_mode_matrix(&reg, DMatrix::identity(3, 3))
        .unwrap()
        .apply(&psi)
        .unwrap();
    assert!(out.add(&psi.scale(c(-1.0))).unwrap().norm() < 1e-14);
}
