//! Weighted (fractional) covers never cost more than integral ones; on a
//! random explicit system the two critical exponents are compared directly.

use ndsthermo::cover::{CoverMode, Variant};
use ndsthermo::instances::{random_explicit_instance, rng};
use ndsthermo::pressure::{critical_alpha, BisectionConfig};
use ndsthermo::weighted::weighted_critical_alpha;

fn main() -> ndsthermo::error::Result<()> {
    let cfg = BisectionConfig::default();
    println!("{:>5} {:>4} {:>10} {:>10} {:>10}", "seed", "|X|", "P^B", "P^W", "P^B-P^W");
    for seed in 0..8 {
        let inst = random_explicit_instance(&mut rng(seed))?;
        let (sp, m) = (&inst.system.space, &inst.system.model);
        let b = critical_alpha(sp, m, &inst.psi, inst.eps, &inst.z, 1, 4, Variant::Sup, CoverMode::Exact, &cfg)?;
        let w = weighted_critical_alpha(sp, m, &inst.psi, inst.eps, &inst.z, 1, 4, &cfg)?;
        println!(
            "{seed:>5} {:>4} {:>10.6} {:>10.6} {:>10.2e}",
            sp.len(),
            b.alpha_star,
            w.alpha_star,
            b.alpha_star - w.alpha_star
        );
    }
    Ok(())
}
