//! Measure-theoretic pressure of Bernoulli measures on the 2-shift with a
//! first-symbol potential, against the closed form `h(p) + E_p[phi]`.

use ndsthermo::measure::{bernoulli_measure, measure_pressure};
use ndsthermo::space::{build_symbolic_shift, Potential};

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_symbolic_shift(2, 12)?;
    let phi = [0.0, 0.4];
    let psi = Potential::first_symbol(&sys.space, &phi)?;
    println!("{:>4} {:>10} {:>10} {:>10}", "p", "raw", "corrected", "exact");
    for p in [0.2, 0.5, 0.7] {
        let mu = bernoulli_measure(&sys.space, &[1.0 - p, p])?;
        let r = measure_pressure(&sys.space, &sys.model, &mu, &psi, &[0.25], (4, 10), 0.5)?;
        let h = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        println!(
            "{p:>4.1} {:>10.6} {:>10.6} {:>10.6}",
            r.headline,
            r.headline_corrected.unwrap_or(f64::NAN),
            h + p * phi[1]
        );
    }
    Ok(())
}
