//! Cover pressure, weighted pressure and the best candidate measure at one
//! scale, for a first-symbol potential on the 2-shift.

use ndsthermo::pointset::TargetSet;
use ndsthermo::space::{build_symbolic_shift, Potential};
use ndsthermo::varprin::{auto_candidates, run_variational_check, Labels, Scale, VariationalOptions};

fn main() -> ndsthermo::error::Result<()> {
    let sys = build_symbolic_shift(2, 12)?;
    let psi = Potential::first_symbol(&sys.space, &[0.0, 2f64.ln()])?;
    let z = TargetSet::full(sys.len());
    let scales = [Scale { eps: 0.25, n_min: 5, n_max: 10 }];
    let cands = auto_candidates(&sys.space, &z)?;
    let labels = Labels {
        system_id: "shift-k2-L12".into(),
        z_id: "all".into(),
        psi_id: "first-symbol".into(),
    };
    let rep = run_variational_check(&sys.space, &sys.model, &psi, &z, &scales, &cands, &labels, &VariationalOptions::default())?;
    for c in &rep.rows[0].candidates {
        println!("{:>16} {:>10.6}", c.id, c.pressure.unwrap_or(f64::NAN));
    }
    print!("{}", rep.to_csv());
    println!("pass: {}", rep.pass);
    Ok(())
}
