//! Two photons on one coupler: coincidence probability against reflectivity,
//! checked against the creation-operator oracle.

use fibre_cnot::engine::{brute_force_oracle, evolve_pair};
use fibre_cnot::modes::{beamsplitter_block, embed, ModeId, ModeLayout, SignedSide};
use std::sync::Arc;

fn main() -> fibre_cnot::Result<()> {
    let layout = Arc::new(ModeLayout::new(["a", "b"])?);
    let (a, b) = (ModeId(0), ModeId(1));
    println!("{:>6} {:>12} {:>12} {:>12}", "R", "coincidence", "oracle", "bunched");
    for step in 0..=12 {
        let r = step as f64 / 12.0;
        let u = embed(&beamsplitter_block(r, SignedSide::First)?, "a", "b", &layout)?;
        let out = evolve_pair(&u, a, b)?;
        let oracle = brute_force_oracle(&u, a, b)?;
        let bunched = out.amplitude(a, a).norm_sqr() + out.amplitude(b, b).norm_sqr();
        println!(
            "{r:>6.3} {:>12.6} {:>12.6} {bunched:>12.6}",
            out.amplitude(a, b).norm_sqr(),
            oracle.amplitude(a, b).norm_sqr()
        );
    }
    Ok(())
}
