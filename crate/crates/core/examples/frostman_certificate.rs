//! A Frostman measure read off the optimal dual of the weighted cover LP,
//! then checked ball by ball.

use ndsthermo::family::enumerate_family;
use ndsthermo::frostman::{frostman_from_family, verify_frostman};
use ndsthermo::space::{build_symbolic_shift, Potential};
use ndsthermo::pointset::TargetSet;

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_symbolic_shift(2, 10)?;
    let psi = Potential::first_symbol(&sys.space, &[0.0, 0.5])?;
    let z = TargetSet::from_indices(sys.len(), (0..sys.len()).filter(|x| x % 3 != 0));
    let fam = enumerate_family(&sys.space, &sys.model, &psi, 0.25, 3, 6)?;
    for alpha in [0.4, 0.8, 1.2] {
        let nu = frostman_from_family(&fam, &z, alpha, 3)?;
        let check = verify_frostman(&fam, &z, &nu);
        println!(
            "alpha {alpha:.1}: ln W = {:>9.5}, ln c = {:>9.5}, gap {:.1e}, support {:>4}, max ratio {:.6}, violations {}",
            nu.log_weighted_value,
            nu.log_c,
            nu.duality_gap.abs(),
            nu.measure.support().len(),
            check.max_ratio,
            check.violations.len()
        );
    }
    Ok(())
}
