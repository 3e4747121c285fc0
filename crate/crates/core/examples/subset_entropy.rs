//! Entropy of a product subset of the 2-shift: coordinates 1, 3, 5, ... are
//! frozen to 0, so half of the symbols are free.

use ndsthermo::cover::{CoverMode, Variant};
use ndsthermo::pressure::{critical_alpha, entropy_scale_correction, BisectionConfig};
use ndsthermo::space::{build_product_subset, build_symbolic_shift, Potential};

fn main() -> ndsthermo::error::Result<()> {
    let len = 12;
    let sys = build_symbolic_shift(2, len)?;
    let allowed: Vec<Vec<usize>> = (0..len).map(|j| if j % 2 == 1 { vec![0] } else { vec![0, 1] }).collect();
    let z = build_product_subset(&sys.space, &allowed)?;
    println!("|Z| = {}", z.count());
    let psi = Potential::zero(sys.len());
    let n = 10;
    let e = critical_alpha(&sys.space, &sys.model, &psi, 0.25, &z, n, n, Variant::Sup, CoverMode::Exact, &BisectionConfig::default())?;
    println!("alpha* = {:.6}, corrected {:.6}", e.alpha_star, entropy_scale_correction(e.alpha_star, n, 2));
    println!("(ln 2) / 2 = {:.6}", 2f64.ln() / 2.0);
    Ok(())
}
