//! Topological entropy of the full 2-shift from exact minimal covers.
//!
//! `cargo run --release --example full_shift_entropy`

use ndsthermo::cover::{CoverMode, Variant};
use ndsthermo::pointset::TargetSet;
use ndsthermo::pressure::{critical_alpha, entropy_scale_correction, BisectionConfig};
use ndsthermo::space::{build_symbolic_shift, Potential};

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_symbolic_shift(2, 12)?;
    let psi = Potential::zero(sys.len());
    let z = TargetSet::full(sys.len());
    let cfg = BisectionConfig::default();
    println!("{:>3} {:>10} {:>10}", "n", "alpha*", "corrected");
    for n in 4..=10 {
        let e = critical_alpha(&sys.space, &sys.model, &psi, 0.25, &z, n, n, Variant::Sup, CoverMode::Exact, &cfg)?;
        // eps = 2^-2: balls of length n are (n + 2)-cylinders
        println!("{n:>3} {:>10.6} {:>10.6}", e.alpha_star, entropy_scale_correction(e.alpha_star, n, 2));
    }
    println!("ln 2 = {:.6}", 2f64.ln());
    Ok(())
}
