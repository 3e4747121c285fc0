//! The three disjointification lemmas on seeded random instances.

use ndsthermo::covering::{integer_weight_disjointify, three_r_disjointify, vitali_5r};
use ndsthermo::instances::{random_3r_instance, random_5r_instance, random_step1_instance, rng};

fn main() -> ndsthermo::error::Result<()> {
    let mut r = rng(42);

    let inst = random_3r_instance(&mut r);
    let sys = inst.system.build()?;
    let balls = inst.build_balls(&sys)?;
    let res = three_r_disjointify(&sys.space, &sys.model, &balls)?;
    println!("3r: {} balls -> {} disjoint, enlargement {}", balls.len(), res.selected.len(), res.enlargement_factor);

    let inst = random_5r_instance(&mut r);
    let sys = inst.system.build()?;
    let balls = inst.build_balls(&sys)?;
    let res = vitali_5r(&sys.space, &sys.model, &balls)?;
    println!("5r: {} balls -> {} disjoint, selected {:?}", balls.len(), res.selected.len(), res.selected);

    let inst = random_step1_instance(&mut r);
    let sys = inst.system.build()?;
    let balls = inst.build_balls(&sys)?;
    let t = inst.t.unwrap_or(1.0);
    let res = integer_weight_disjointify(
        &sys.space,
        &sys.model,
        &balls,
        inst.multiplicities.as_deref().unwrap_or_default(),
        inst.log_weights.as_deref().unwrap_or_default(),
        t,
    )?;
    println!(
        "step 1: t = {t:.3}, |Z_t| = {}, {} rounds, J = {:?}, ln lhs {:.4} <= ln rhs {:.4}",
        res.z_t.len(),
        res.rounds,
        res.selected,
        res.lhs_log,
        res.rhs_log
    );
    Ok(())
}
