//! Process and average fidelity intervals from two logical fidelities.

use fibre_cnot::metrics::FidelityReport;

fn main() {
    let report = FidelityReport::new(Some((0.90, Some(0.02))), Some((0.89, Some(0.02))));
    print!("{}", report.to_text());
}
