//! Builds the exact gate network and prints its truth tables in both bases.

use fibre_cnot::gate::{build_ideal_cnot, ideal_layout, LogicalBasis, LogicalPorts};
use fibre_cnot::metrics::truth_table;

fn main() -> fibre_cnot::Result<()> {
    let layout = ideal_layout();
    let gate = build_ideal_cnot(&layout)?;
    let ports = LogicalPorts::for_layout(&layout)?;
    println!("modes: {layout}\n");
    for basis in LogicalBasis::ALL {
        let table = truth_table(&gate, basis, &ports)?;
        println!("{}", table.to_text());
    }
    Ok(())
}
