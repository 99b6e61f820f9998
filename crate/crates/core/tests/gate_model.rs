use fibre_cnot::gate::{
    build_ideal_cnot, build_model_circuit, ideal_eta, ideal_layout, max_visibility_at,
    model_layout, overlap_to_visibility, overlap_to_visibility_at, relative_visibility,
    visibility_to_overlap, GateParams, LogicalBasis, LogicalPorts,
};
use fibre_cnot::metrics::{ideal_table, logical_fidelity, model_truth_table, truth_table};
use fibre_cnot::modes::UNITARITY_TOLERANCE;
use fibre_cnot::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn with_overlap(x: f64) -> GateParams {
    GateParams {
        overlap: x,
        ..GateParams::ideal()
    }
}

/// Input row whose ideal output is flipped, paired with that output.
fn flipped_rows(basis: LogicalBasis) -> [(usize, usize); 2] {
    match basis {
        LogicalBasis::ZZ => [(2, 3), (3, 2)],
        LogicalBasis::XX => [(1, 3), (3, 1)],
    }
}

#[test]
fn ideal_eta_values() {
    assert_eq!(ideal_eta(LogicalBasis::ZZ), (1.0, 0.5, 1.0, 0.5));
    assert_eq!(ideal_eta(LogicalBasis::XX), (0.5, 1.0, 0.5, 1.0));
}

#[test]
fn full_overlap_model_matches_ideal_network() {
    let layout = ideal_layout();
    let ideal = build_ideal_cnot(&layout).unwrap();
    let ports = LogicalPorts::for_layout(&layout).unwrap();
    for basis in LogicalBasis::ALL {
        let reference = truth_table(&ideal, basis, &ports).unwrap();
        let model = model_truth_table(&GateParams::ideal(), basis).unwrap();
        assert!(model.max_difference(&reference) < 1e-9);
        assert!(reference.max_difference(&ideal_table(basis)) < 1e-9);
        for s in model.success.unwrap() {
            assert!((s - 1.0 / 9.0).abs() < 1e-9);
        }
    }
}

#[test]
fn mismatch_leaves_control_zero_rows_and_balances_diagonal_errors() {
    for step in 0..=10 {
        let x = step as f64 / 10.0;
        for basis in LogicalBasis::ALL {
            let t = model_truth_table(&with_overlap(x), basis).unwrap();
            let ideal = ideal_table(basis);
            for r in basis.control_zero_rows() {
                for o in 0..4 {
                    assert!((t.get(r, o) - ideal.get(r, o)).abs() < 1e-9, "x={x} {basis} row {r}");
                }
            }
            let [(r1, o1), (r2, o2)] = flipped_rows(basis);
            let (e1, e2) = (t.get(r1, r1), t.get(r2, r2));
            assert!((e1 - e2).abs() < 1e-9, "x={x} {basis}: {e1} vs {e2}");
            assert!((t.get(r1, o1) + e1 - 1.0).abs() < 1e-9);
            assert!((t.get(r2, o2) + e2 - 1.0).abs() < 1e-9);
            if x < 1.0 {
                assert!(e1 > 1e-6);
            }
        }
    }
}

#[test]
fn fidelity_is_monotone_in_overlap() {
    for basis in LogicalBasis::ALL {
        let ideal = ideal_table(basis);
        let mut last = f64::NEG_INFINITY;
        for step in 0..=100 {
            let x = step as f64 / 100.0;
            let f = logical_fidelity(&model_truth_table(&with_overlap(x), basis).unwrap(), &ideal)
                .unwrap();
            assert!(f >= last - 1e-12, "{basis} x={x}: {f} < {last}");
            last = f;
        }
        assert!((last - 1.0).abs() < 1e-9);
    }
}

/// Logical state vector `(H, V)` of one photon.
fn logical_state(basis: LogicalBasis, bit: usize) -> (f64, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match (basis, bit) {
        (LogicalBasis::ZZ, 0) => (0.0, 1.0),
        (LogicalBasis::ZZ, _) => (1.0, 0.0),
        (LogicalBasis::XX, 0) => (s, s),
        (LogicalBasis::XX, _) => (s, -s),
    }
}

/// Distinguishable photons: each one propagates on its own through the
/// single-photon matrix and the joint statistics factorize. Detectors do not
/// know which photon arrived, so both assignments to the two analysers count.
fn classical_table(basis: LogicalBasis) -> ([[f64; 4]; 4], [f64; 4]) {
    let layout = ideal_layout();
    let u = build_ideal_cnot(&layout).unwrap();
    let m = |s: &str| layout.mode(s).unwrap().index();
    let (ch, cv, th, tv) = (m("C_H"), m("C_V"), m("T_H"), m("T_V"));
    let propagate = |h: usize, v: usize, state: (f64, f64)| -> Vec<Complex64> {
        (0..u.dim())
            .map(|k| u.matrix()[(k, h)] * state.0 + u.matrix()[(k, v)] * state.1)
            .collect()
    };
    let project = |amps: &[Complex64], h: usize, v: usize, bit: usize| -> f64 {
        let (a, b) = logical_state(basis, bit);
        (amps[h] * a + amps[v] * b).norm_sqr()
    };
    let mut probs = [[0.0; 4]; 4];
    let mut success = [0.0; 4];
    for input in 0..4 {
        let c = propagate(ch, cv, logical_state(basis, input >> 1));
        let t = propagate(th, tv, logical_state(basis, input & 1));
        for out in 0..4 {
            let (a, b) = (out >> 1, out & 1);
            let p = project(&c, ch, cv, a) * project(&t, th, tv, b)
                + project(&t, ch, cv, a) * project(&c, th, tv, b);
            probs[input][out] = p;
            success[input] += p;
        }
        for p in probs[input].iter_mut() {
            *p /= success[input];
        }
    }
    (probs, success)
}

#[test]
fn zero_overlap_reduces_to_classical_statistics() {
    for basis in LogicalBasis::ALL {
        let (probs, success) = classical_table(basis);
        let t = model_truth_table(&with_overlap(0.0), basis).unwrap();
        for i in 0..4 {
            for o in 0..4 {
                assert!((t.get(i, o) - probs[i][o]).abs() < 1e-9, "{basis} {i}->{o}");
            }
            assert!((t.success.unwrap()[i] - success[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn zero_overlap_control_one_rows_in_computational_basis() {
    let t = model_truth_table(&with_overlap(0.0), LogicalBasis::ZZ).unwrap();
    let row = [t.get(2, 0), t.get(2, 1), t.get(2, 2), t.get(2, 3)];
    let expected = [0.0, 0.0, 2.0 / 3.0, 1.0 / 3.0];
    for (a, b) in row.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

/// Coincidence rate at a real coupler, written out by hand: both photons
/// reflect or both transmit, with amplitudes adding only for the matched
/// part of the wavepacket.
fn dip_visibility_oracle(x: f64, r: f64) -> f64 {
    let t = 1.0 - r;
    let distinguishable = r * r + t * t;
    let matched = (t - r).powi(2);
    let c = x * x * matched + (1.0 - x * x) * distinguishable;
    (distinguishable - c) / distinguishable
}

#[test]
fn visibility_matches_hand_derivation() {
    assert!((max_visibility_at(1.0 / 3.0).unwrap() - 0.8).abs() < 1e-12);
    assert!(overlap_to_visibility(0.0).unwrap().abs() < 1e-15);
    for step in 0..=100 {
        let x = step as f64 / 100.0;
        for r in [0.2, 1.0 / 3.0, 0.5, 0.7] {
            let v = overlap_to_visibility_at(x, r).unwrap();
            assert!((v - dip_visibility_oracle(x, r)).abs() < 1e-12, "x={x} r={r}");
        }
        let back = visibility_to_overlap(overlap_to_visibility(x).unwrap()).unwrap();
        assert!((back - x).abs() < 1e-9);
    }
}

#[test]
fn visibility_inverse_agrees_with_bisection() {
    for target in [0.05, 0.3, 0.752, 0.79] {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if overlap_to_visibility(mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((visibility_to_overlap(target).unwrap() - 0.5 * (lo + hi)).abs() < 1e-9);
    }
    assert!((relative_visibility(0.5).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn visibility_domain_errors() {
    assert!(matches!(visibility_to_overlap(0.81), Err(Error::Domain { .. })));
    assert!(matches!(visibility_to_overlap(-0.01), Err(Error::Domain { .. })));
    assert!(matches!(overlap_to_visibility(1.2), Err(Error::Domain { .. })));
}

#[test]
fn invalid_params_are_rejected() {
    let mut p = GateParams::ideal();
    p.eta_3a = 1.5;
    assert!(build_model_circuit(&p, LogicalBasis::ZZ).is_err());
    let mut p = GateParams::ideal();
    p.overlap = f64::NAN;
    assert!(build_model_circuit(&p, LogicalBasis::XX).is_err());
}

#[test]
fn model_layout_holds_twin_modes() {
    let l = model_layout();
    for label in ["C_H", "C_V", "T_H", "T_V", "C_H2", "C_V2", "D1", "D2"] {
        assert!(l.contains(label), "{label}");
    }
}

fn arb_params() -> impl Strategy<Value = GateParams> {
    (
        (0.2f64..0.5, 0.8f64..=1.0, 0.2f64..0.5, 0.8f64..=1.0, 0.2f64..0.5, 0.8f64..=1.0),
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0),
        (-3.2f64..3.2, -3.2f64..3.2),
    )
        .prop_map(|((a, b, c, d, e, f), (x, e3a, e3b, e4a, e4b), (pc, pt))| GateParams {
            r_h_central: a,
            r_v_central: b,
            r_h_outer1: c,
            r_v_outer1: d,
            r_h_outer2: e,
            r_v_outer2: f,
            overlap: x,
            eta_3a: e3a,
            eta_3b: e3b,
            eta_4a: e4a,
            eta_4b: e4b,
            residual_phase_c: pc,
            residual_phase_t: pt,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_circuits_are_unitary(p in arb_params()) {
        for basis in LogicalBasis::ALL {
            let u = build_model_circuit(&p, basis).unwrap();
            prop_assert!(u.unitarity_error() < UNITARITY_TOLERANCE);
        }
    }

    #[test]
    fn model_tables_are_stochastic(p in arb_params()) {
        for basis in LogicalBasis::ALL {
            if let Ok(t) = model_truth_table(&p, basis) {
                prop_assert!(t.validate().is_ok());
            }
        }
    }
}
