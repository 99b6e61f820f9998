mod common;

use fibre_cnot::gate::LogicalBasis;
use fibre_cnot::metrics::{
    average_fidelity_bounds, ideal_table, logical_fidelity, process_fidelity_bounds, similarity,
    TruthTable,
};
use fibre_cnot::Error;
use proptest::prelude::*;

#[test]
fn similarity_of_random_tables_with_themselves() {
    for seed in 0..1000 {
        let sparsity = [0.0, 0.3, 0.6][seed as usize % 3];
        let m = common::random_stochastic(LogicalBasis::ZZ, seed, sparsity);
        assert!((similarity(&m, &m).unwrap() - 1.0).abs() < 1e-12, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn similarity_is_bounded_and_symmetric(a in any::<u64>(), b in any::<u64>(), sp in 0.0f64..0.7) {
        let m = common::random_stochastic(LogicalBasis::XX, a, sp);
        let e = common::random_stochastic(LogicalBasis::XX, b, sp);
        let s = similarity(&m, &e).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&s));
        prop_assert_eq!(s, similarity(&e, &m).unwrap());
    }

    /// Row-wise Bhattacharyya bound: an entry gap δ costs at least δ²/8 of
    /// the summed overlap, so S = 1 forces M = E.
    #[test]
    fn unit_similarity_forces_equality(a in any::<u64>(), b in any::<u64>(), sp in 0.0f64..0.7, mix in 0.0f64..=1.0) {
        let m = common::random_stochastic(LogicalBasis::ZZ, a, sp);
        let other = common::random_stochastic(LogicalBasis::ZZ, b, sp);
        let mut probs = m.probs;
        for (row, orow) in probs.iter_mut().zip(other.probs.iter()) {
            for (p, q) in row.iter_mut().zip(orow) {
                *p = (1.0 - mix) * *p + mix * q;
            }
        }
        let e = TruthTable::new(LogicalBasis::ZZ, probs).unwrap();
        let delta = m.max_difference(&e);
        let s = similarity(&m, &e).unwrap();
        prop_assert!(s <= (1.0 - delta * delta / 8.0).powi(2) + 1e-12);
        if s >= 1.0 - 1e-15 {
            prop_assert!(delta < 1e-7);
        }
    }

    #[test]
    fn process_bounds_are_ordered(zz in 0.0f64..=1.0, xx in 0.0f64..=1.0) {
        let (lo, hi) = process_fidelity_bounds(zz, xx);
        prop_assert!(lo <= hi);
        prop_assert_eq!(lo, zz + xx - 1.0);
        prop_assert_eq!(hi, zz.min(xx));
        let (alo, ahi) = average_fidelity_bounds(lo, hi);
        prop_assert!(alo <= ahi);
    }
}

#[test]
fn disjoint_supports_have_zero_similarity() {
    let a = ideal_table(LogicalBasis::ZZ);
    let mut probs = [[0.0; 4]; 4];
    for (i, row) in probs.iter_mut().enumerate() {
        row[(i + 2) % 4] = 1.0;
    }
    let b = TruthTable::new(LogicalBasis::ZZ, probs).unwrap();
    assert_eq!(similarity(&a, &b).unwrap(), 0.0);
}

#[test]
fn similarity_rejects_mixed_bases() {
    let a = ideal_table(LogicalBasis::ZZ);
    let b = ideal_table(LogicalBasis::XX);
    assert!(matches!(similarity(&a, &b), Err(Error::BasisMismatch { .. })));
    assert!(matches!(logical_fidelity(&a, &b), Err(Error::BasisMismatch { .. })));
}

#[test]
fn fidelity_reference_points() {
    for basis in LogicalBasis::ALL {
        let ideal = ideal_table(basis);
        assert_eq!(logical_fidelity(&ideal, &ideal).unwrap(), 1.0);
        let uniform = TruthTable::new(basis, [[0.25; 4]; 4]).unwrap();
        assert_eq!(logical_fidelity(&uniform, &ideal).unwrap(), 0.25);
    }
}

#[test]
fn fidelity_bounds_reference_points() {
    let (lo, hi) = process_fidelity_bounds(0.90, 0.89);
    assert!((lo - 0.79).abs() < 1e-12 && hi == 0.89);
    let (alo, ahi) = average_fidelity_bounds(lo, hi);
    assert_eq!(format!("{alo:.2} {ahi:.2}"), "0.83 0.91");
    assert_eq!(process_fidelity_bounds(1.0, 1.0), (1.0, 1.0));
    let (lo, hi) = process_fidelity_bounds(0.5, 0.4);
    assert!((lo + 0.1).abs() < 1e-12 && hi == 0.4);
    assert_eq!(average_fidelity_bounds(1.0, 1.0), (1.0, 1.0));
}

#[test]
fn text_round_trip_is_stable() {
    for seed in 0..50 {
        let t = common::random_stochastic(LogicalBasis::XX, seed, 0.2);
        let back = TruthTable::parse_text(&t.to_text()).unwrap();
        assert!(back.max_difference(&t) < 1e-11);
        assert_eq!(back.to_text(), TruthTable::parse_text(&back.to_text()).unwrap().to_text());
    }
}
