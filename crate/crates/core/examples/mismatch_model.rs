//! Sweeps the overlap of the imperfection model and shows how the diagonal
//! error terms grow on the control-1 rows.

use fibre_cnot::gate::{GateParams, LogicalBasis};
use fibre_cnot::metrics::{ideal_table, logical_fidelity, model_truth_table};

fn main() -> fibre_cnot::Result<()> {
    println!("{:>7} {:>8} {:>8} {:>10} {:>10}", "overlap", "F_ZZ", "F_XX", "diag ZZ", "diag XX");
    for step in 0..=10 {
        let params = GateParams {
            overlap: step as f64 / 10.0,
            ..GateParams::ideal()
        };
        let zz = model_truth_table(&params, LogicalBasis::ZZ)?;
        let xx = model_truth_table(&params, LogicalBasis::XX)?;
        let [r, _] = LogicalBasis::ZZ.control_one_rows();
        let [s, _] = LogicalBasis::XX.control_one_rows();
        println!(
            "{:>7.1} {:>8.4} {:>8.4} {:>10.4} {:>10.4}",
            params.overlap,
            logical_fidelity(&zz, &ideal_table(LogicalBasis::ZZ))?,
            logical_fidelity(&xx, &ideal_table(LogicalBasis::XX))?,
            zz.get(r, r),
            xx.get(s, s),
        );
    }

    let tilted = GateParams {
        overlap: 0.97,
        eta_3b: 0.53,
        eta_4a: 0.97,
        ..GateParams::ideal()
    };
    println!("\noverlap 0.97 with tilted mixers:\n");
    print!("{}", model_truth_table(&tilted, LogicalBasis::ZZ)?.to_text());
    Ok(())
}
