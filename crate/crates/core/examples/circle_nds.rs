//! A genuinely non-autonomous system: the circle grid with maps alternating
//! between `x -> 2x` and `x -> 3x`. The limiting entropy is the average
//! `(ln 2 + ln 3) / 2`; at 360 grid points the covers are too large for the
//! exact solver, so these are greedy upper estimates decreasing in `n`.

use ndsthermo::cover::{CoverMode, Variant};
use ndsthermo::pointset::TargetSet;
use ndsthermo::pressure::{critical_alpha, BisectionConfig};
use ndsthermo::space::{build_circle_multiplication, dynamical_ball, Potential};

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_circle_multiplication(&[2, 3], 360)?;
    let b = dynamical_ball(&sys.model, &sys.space, 0, 1, 3, 0.05)?;
    println!("B(0, 1, 3, 0.05) has {} of {} grid points", b.members.len(), sys.len());
    let psi = Potential::zero(sys.len());
    let z = TargetSet::full(sys.len());
    for n in 1..=4 {
        let e = critical_alpha(&sys.space, &sys.model, &psi, 0.05, &z, n, n, Variant::Sup, CoverMode::Auto, &BisectionConfig::default())?;
        println!("n = {n}: alpha* = {:.6} ({:?})", e.alpha_star, e.bound_kind);
    }
    println!("(ln 2 + ln 3) / 2 = {:.6}", (2f64.ln() + 3f64.ln()) / 2.0);
    Ok(())
}
