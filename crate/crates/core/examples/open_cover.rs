//! Pressure from strings over a fixed open cover instead of Bowen balls.
//! On the 2-shift the cover by the two 1-cylinders generates, so the string
//! sums reproduce the cylinder counts.

use ndsthermo::cover::CoverMode;
use ndsthermo::opencover::open_cover_pressure;
use ndsthermo::pointset::{PointSet, TargetSet};
use ndsthermo::pressure::BisectionConfig;
use ndsthermo::space::{build_symbolic_shift, Potential};

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_symbolic_shift(2, 10)?;
    let half = sys.len() / 2;
    let cover = [PointSet::range(0, half), PointSet::range(half, sys.len())];
    let z = TargetSet::full(sys.len());
    let psi = Potential::first_symbol(&sys.space, &[0.0, 1.0])?;
    for big_n in [2, 4, 8] {
        let r = open_cover_pressure(&sys.space, &sys.model, &psi, &cover, &z, big_n, 10, None, CoverMode::Exact, &BisectionConfig::default())?;
        println!("N = {big_n}: {} strings, alpha* = {:.6}", r.strings, r.estimate.alpha_star);
    }
    println!("ln(1 + e) = {:.6}", (1.0 + 1f64.exp()).ln());
    Ok(())
}
