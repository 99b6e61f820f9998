mod common;

use fibre_cnot::engine::{brute_force_oracle, evolve_pair, PhotonPairState};
use fibre_cnot::modes::ModeId;
use proptest::prelude::*;

fn all_pairs(n: usize) -> impl Iterator<Item = (ModeId, ModeId)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (ModeId(i), ModeId(j))))
}

#[test]
fn oracle_matches_on_six_mode_unitaries() {
    for seed in 0..200 {
        let u = common::random_unitary(6, 1_000 + seed);
        for (i, j) in all_pairs(6) {
            let fast = evolve_pair(&u, i, j).unwrap();
            let slow = brute_force_oracle(&u, i, j).unwrap();
            assert!(fast.max_difference(&slow) < 1e-9, "seed {seed} input {i:?},{j:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_equivalence_and_conservation(seed in any::<u64>(), n in 2usize..=8) {
        let u = common::random_unitary(n, seed);
        for (i, j) in all_pairs(n) {
            let fast = evolve_pair(&u, i, j).unwrap();
            let slow = brute_force_oracle(&u, i, j).unwrap();
            prop_assert!(fast.max_difference(&slow) < 1e-9);
            prop_assert!((fast.total_probability() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exchange_symmetry_is_exact(seed in any::<u64>(), n in 2usize..=8, a in 0usize..8, b in 0usize..8) {
        let (a, b) = (a % n, b % n);
        let u = common::random_unitary(n, seed);
        let ab = evolve_pair(&u, ModeId(a), ModeId(b)).unwrap();
        let ba = evolve_pair(&u, ModeId(b), ModeId(a)).unwrap();
        prop_assert_eq!(ab, ba);
    }
}

#[test]
fn identity_is_fixed_point() {
    let u = fibre_cnot::modes::CircuitUnitary::identity(common::layout(4));
    for (i, j) in all_pairs(4) {
        let out = brute_force_oracle(&u, i, j).unwrap();
        assert!(out.max_difference(&PhotonPairState::basis(i, j)) < 1e-15);
    }
}
