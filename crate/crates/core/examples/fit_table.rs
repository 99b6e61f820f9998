//! Fits the imperfection model to tables from known parameters and prints
//! the similarity table with the per-stage gains.

use fibre_cnot::fit::{fit, report_errors_breakdown, FitSpec};
use fibre_cnot::gate::{overlap_for_relative_visibility, GateParams, LogicalBasis};
use fibre_cnot::metrics::model_truth_table;

fn main() -> fibre_cnot::Result<()> {
    let truth = GateParams {
        overlap: overlap_for_relative_visibility(0.94)?,
        eta_3a: 0.97,
        eta_3b: 0.46,
        eta_4a: 0.98,
        eta_4b: 0.53,
        ..GateParams::ideal()
    };
    let zz = model_truth_table(&truth, LogicalBasis::ZZ)?;
    let xx = model_truth_table(&truth, LogicalBasis::XX)?;
    let outcome = fit(&zz, &xx, &FitSpec::default())?;
    print!("{}", outcome.report.to_text());
    print!("\n{}", report_errors_breakdown(&outcome.report).to_text());
    Ok(())
}
