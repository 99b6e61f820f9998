//! Converts between wavepacket overlap and dip visibility at the central
//! coupler.

use fibre_cnot::gate::{
    max_visibility_at, overlap_for_relative_visibility, overlap_to_visibility,
    visibility_to_overlap,
};

fn main() -> fibre_cnot::Result<()> {
    let v_max = max_visibility_at(1.0 / 3.0)?;
    println!("maximum visibility at R = 1/3: {v_max:.6}");
    for x in [0.0, 0.5, 0.9, 0.95, 0.99, 1.0] {
        let v = overlap_to_visibility(x)?;
        println!("overlap {x:.2} -> V {v:.6} ({:.2}% of max)", 100.0 * v / v_max);
    }
    let x = overlap_for_relative_visibility(0.94)?;
    println!("94% of maximum needs overlap {x:.6}");
    println!("V = 0.6 needs overlap {:.6}", visibility_to_overlap(0.6)?);
    Ok(())
}
