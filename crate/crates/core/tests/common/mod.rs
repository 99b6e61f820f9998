#![allow(dead_code)]

use std::sync::Arc;

use fibre_cnot::gate::LogicalBasis;
use fibre_cnot::metrics::TruthTable;
use fibre_cnot::modes::{CircuitUnitary, ModeLayout};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn layout(n: usize) -> Arc<ModeLayout> {
    Arc::new(ModeLayout::new((0..n).map(|i| format!("m{i}"))).unwrap())
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix.
pub fn random_unitary(n: usize, seed: u64) -> CircuitUnitary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = g.qr().q();
    CircuitUnitary::from_matrix(layout(n), q).unwrap()
}

pub fn random_stochastic(basis: LogicalBasis, seed: u64, sparsity: f64) -> TruthTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs = [[0.0; 4]; 4];
    for row in probs.iter_mut() {
        loop {
            for p in row.iter_mut() {
                *p = if rng.random::<f64>() < sparsity {
                    0.0
                } else {
                    rng.random::<f64>()
                };
            }
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|p| *p /= total);
                break;
            }
        }
    }
    TruthTable::new(basis, probs).unwrap()
}
