//! Synthetic coincidence counts with background, then subtraction,
//! normalization and a bootstrap error on the fidelity.

use fibre_cnot::gate::{GateParams, LogicalBasis};
use fibre_cnot::metrics::{ideal_table, logical_fidelity, model_truth_table, FidelityReport};
use fibre_cnot::pipeline::{bootstrap_fidelity_error, counts_to_truth_table, merge, synth_counts};

fn main() -> fibre_cnot::Result<()> {
    let params = GateParams {
        overlap: 0.96,
        ..GateParams::ideal()
    };
    let mut sets = Vec::new();
    for (seed, basis) in LogicalBasis::ALL.into_iter().enumerate() {
        sets.push(synth_counts(&model_truth_table(&params, basis)?, 400, 2.0, seed as u64)?);
    }
    let counts = merge(sets)?;
    print!("{}", counts.to_text());

    let mut fids = Vec::new();
    for basis in LogicalBasis::ALL {
        let measured = counts_to_truth_table(&counts, basis)?;
        let ideal = ideal_table(basis);
        let f = logical_fidelity(&measured, &ideal)?;
        let err = bootstrap_fidelity_error(&counts, basis, &ideal, 2000, 17)?;
        println!("\n{}", measured.to_text());
        fids.push((f, Some(err)));
    }
    print!("\n{}", FidelityReport::new(Some(fids[0]), Some(fids[1])).to_text());
    Ok(())
}
