use proptest::prelude::*;
use rand::seq::SliceRandom;

use ndsthermo::cover::{BoundKind, CoverMode, PreparedCover, Variant};
use ndsthermo::covering::{integer_weight_disjointify, real_weight_disjointify, three_r_disjointify_ordered, DEFAULT_DENOMINATOR};
use ndsthermo::family::enumerate_family;
use ndsthermo::frostman::{frostman_from_family, verify_frostman};
use ndsthermo::instances::{random_3r_instance, random_explicit_instance, random_step1_instance, random_symbolic_instance, rng};
use ndsthermo::lp::{solve_fractional, FractionalInstance};
use ndsthermo::measure::{local_pressure_profile, ProbMeasure};
use ndsthermo::setcover::{exact, ExactLimits, SetCoverInstance};
use ndsthermo::space::{
    birkhoff_sum, birkhoff_sup, bowen_distance, build_circle_multiplication, build_symbolic_shift, dynamical_ball,
    dynamical_ball_bruteforce, modulus_of_continuity, Potential,
};
use ndsthermo::weighted::weighted_cover_value;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn bowen_metric_axioms(seed in any::<u64>(), i in 1usize..4, n in 1usize..5) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let (sp, m) = (&inst.system.space, &inst.system.model);
        let p = sp.len();
        for x in 0..p {
            prop_assert_eq!(bowen_distance(m, sp, i, n, x, x).unwrap(), 0.0);
            prop_assert_eq!(bowen_distance(m, sp, i, 1, x, (x + 1) % p).unwrap(), sp.dist(x, (x + 1) % p));
            for y in 0..p {
                let dxy = bowen_distance(m, sp, i, n, x, y).unwrap();
                prop_assert_eq!(dxy, bowen_distance(m, sp, i, n, y, x).unwrap());
                prop_assert!(bowen_distance(m, sp, i, n + 1, x, y).unwrap() >= dxy);
                let z = (x * 7 + y) % p;
                prop_assert!(dxy <= bowen_distance(m, sp, i, n, x, z).unwrap() + bowen_distance(m, sp, i, n, z, y).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn balls_nest_in_n_and_eps(seed in any::<u64>(), n in 1usize..5, x in 0usize..16) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let (sp, m) = (&inst.system.space, &inst.system.model);
        let x = x % sp.len();
        let b = dynamical_ball(m, sp, x, 1, n, inst.eps).unwrap();
        prop_assert!(dynamical_ball(m, sp, x, 1, n + 1, inst.eps).unwrap().members.is_subset(&b.members));
        prop_assert!(b.members.is_subset(&dynamical_ball(m, sp, x, 1, n, 2.0 * inst.eps).unwrap().members));
        prop_assert!(b.members.contains(x));
    }

    #[test]
    fn birkhoff_cocycle_and_sandwich(seed in any::<u64>(), n in 1usize..5, k in 1usize..4, x in 0usize..16) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let (sp, m, psi) = (&inst.system.space, &inst.system.model, &inst.psi);
        let x = x % sp.len();
        let whole = birkhoff_sum(m, psi, 1, n + k, x);
        let split = birkhoff_sum(m, psi, 1, n, x) + birkhoff_sum(m, psi, 1 + n, k, m.iterate(1, n, x));
        prop_assert!((whole - split).abs() < 1e-12);
        let b = dynamical_ball(m, sp, x, 1, n, inst.eps).unwrap();
        let sup = birkhoff_sup(m, psi, 1, n, b.members.iter());
        let s = birkhoff_sum(m, psi, 1, n, x);
        prop_assert!(s <= sup + 1e-12);
        prop_assert!(sup <= s + n as f64 * modulus_of_continuity(sp, psi, inst.eps) + 1e-12);
    }

    #[test]
    fn exact_cover_bounds(seed in any::<u64>()) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let sys = &inst.system;
        let fam = enumerate_family(&sys.space, &sys.model, &inst.psi, inst.eps, 1, 3).unwrap();
        let prep = PreparedCover::from_family(&fam, &inst.z, 1, Variant::Sup).unwrap();
        for alpha in [-0.5, 0.3, 1.2] {
            let e = prep.solve(alpha, CoverMode::Exact).unwrap().log_objective;
            let g = prep.solve(alpha, CoverMode::Greedy).unwrap();
            let l = prep.solve(alpha, CoverMode::Lp).unwrap();
            prop_assert_eq!(g.bound_kind, BoundKind::UpperGreedy);
            prop_assert!(l.log_objective <= e + 1e-9);
            prop_assert!(e <= g.log_objective + 1e-12);
        }
    }

    #[test]
    fn constant_shift_factorizes(seed in any::<u64>(), c in -2.0f64..2.0, alpha in -1.0f64..2.0) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let sys = &inst.system;
        let a = enumerate_family(&sys.space, &sys.model, &inst.psi, inst.eps, 2, 3).unwrap();
        let shifted = inst.psi.shifted(c);
        let b = enumerate_family(&sys.space, &sys.model, &shifted, inst.eps, 2, 3).unwrap();
        let pa = PreparedCover::from_family(&a, &inst.z, 2, Variant::Sup).unwrap();
        let pb = PreparedCover::from_family(&b, &inst.z, 2, Variant::Sup).unwrap();
        let va = pa.solve(alpha, CoverMode::Exact).unwrap().log_objective;
        let vb = pb.solve(alpha + c, CoverMode::Exact).unwrap().log_objective;
        prop_assert!((va - vb).abs() < 1e-9 * (1.0 + va.abs()));
    }

    #[test]
    fn lp_strong_duality(seed in any::<u64>(), alpha in -1.0f64..2.0) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let sys = &inst.system;
        let fam = enumerate_family(&sys.space, &sys.model, &inst.psi, inst.eps, 1, 4).unwrap();
        let w = weighted_cover_value(&fam, &inst.z, alpha, 1).unwrap();
        prop_assert!(w.duality_gap <= 1e-7);
        let m = PreparedCover::from_family(&fam, &inst.z, 1, Variant::Sup).unwrap().solve(alpha, CoverMode::Exact).unwrap();
        prop_assert!(w.log_objective <= m.log_objective + 1e-9);
    }

    #[test]
    fn frostman_certificates_verify(seed in any::<u64>(), alpha in -0.5f64..1.5) {
        let inst = random_explicit_instance(&mut rng(seed)).unwrap();
        let sys = &inst.system;
        let fam = enumerate_family(&sys.space, &sys.model, &inst.psi, inst.eps, 2, 4).unwrap();
        let nu = frostman_from_family(&fam, &inst.z, alpha, 2).unwrap();
        let total: f64 = nu.measure.masses().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let check = verify_frostman(&fam, &inst.z, &nu);
        prop_assert!(check.pass, "{:?}", check);
    }

    #[test]
    fn three_r_any_tie_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_3r_instance(&mut r);
        let sys = inst.system.build().unwrap();
        let balls = inst.build_balls(&sys).unwrap();
        let mut order: Vec<usize> = (0..balls.len()).collect();
        order.shuffle(&mut r);
        let res = three_r_disjointify_ordered(&sys.space, &sys.model, &balls, &order).unwrap();
        for (i, &s) in res.certificate.iter().enumerate() {
            prop_assert!(balls[s].length <= balls[i].length);
            prop_assert!(res.selected.contains(&s));
        }
    }

    #[test]
    fn step1_weight_inequality(seed in any::<u64>()) {
        let inst = random_step1_instance(&mut rng(seed));
        let sys = inst.system.build().unwrap();
        let balls = inst.build_balls(&sys).unwrap();
        let w = inst.log_weights.clone().unwrap();
        let r = integer_weight_disjointify(&sys.space, &sys.model, &balls, inst.multiplicities.as_ref().unwrap(), &w, inst.t.unwrap()).unwrap();
        prop_assert!(r.lhs_log <= r.rhs_log + 1e-12);
        prop_assert_eq!(r.witness.len(), r.z_t.len());
        let real: Vec<f64> = inst.multiplicities.unwrap().iter().map(|&c| c as f64 * 0.37).collect();
        let rr = real_weight_disjointify(&sys.space, &sys.model, &balls, &real, &w, inst.t.unwrap() * 0.37, DEFAULT_DENOMINATOR).unwrap();
        prop_assert!(rr.result.lhs_log <= rr.result.rhs_log + 1e-12);
    }

    #[test]
    fn local_exponent_shift(x in 0usize..1024, c in -1.0f64..1.0) {
        let sys = build_symbolic_shift(2, 10).unwrap();
        let mu = ProbMeasure::uniform(1024).unwrap();
        let psi = Potential::first_symbol(&sys.space, &[0.2, -0.4]).unwrap();
        let a = local_pressure_profile(&sys.space, &sys.model, &mu, &psi, x, 0.25, (2, 8), 0.5).unwrap();
        let b = local_pressure_profile(&sys.space, &sys.model, &mu, &psi.shifted(c), x, 0.25, (2, 8), 0.5).unwrap();
        prop_assert!((b.liminf_estimate - a.liminf_estimate - c).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn exact_matches_enumeration(sets in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..4), 1..9),
                                 weights in prop::collection::vec(-2.0f64..2.0, 9)) {
        let inst = SetCoverInstance {
            n_points: 7,
            sets: sets.iter().map(|s| s.iter().copied().collect()).collect(),
            log_weights: weights[..sets.len()].to_vec(),
        };
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << sets.len()) {
            let mut hit = [false; 7];
            let mut w = 0.0;
            for (i, s) in sets.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    w += inst.log_weights[i].exp();
                    for &x in s {
                        hit[x as usize] = true;
                    }
                }
            }
            if hit.iter().all(|&h| h) {
                best = best.min(w);
            }
        }
        match exact(&inst, &ExactLimits::default()) {
            Ok(sol) => {
                prop_assert!((sol.log_value.exp() - best).abs() < 1e-9 * best);
                prop_assert!(inst.is_cover(&sol.chosen));
            }
            Err(_) => prop_assert!(best.is_infinite()),
        }
        if best.is_finite() {
            let lp = solve_fractional(&FractionalInstance {
                n_points: 7,
                sets: inst.sets.clone(),
                log_weights: inst.log_weights.clone(),
                demand: vec![1.0; 7],
            }).unwrap();
            prop_assert!(lp.log_value <= best.ln() + 1e-9);
        }
    }

    #[test]
    fn symbolic_balls_match_bruteforce(len in 2usize..8, x in 0usize..256, n in 1usize..6, j in 1usize..4) {
        let sys = build_symbolic_shift(2, len).unwrap();
        let x = x % sys.len();
        let eps = 0.75 * 0.5f64.powi(j as i32 - 1);
        prop_assume!(n + j <= len);
        let a = dynamical_ball(&sys.model, &sys.space, x, 1, n, eps).unwrap();
        let b = dynamical_ball_bruteforce(&sys.model, &sys.space, x, 1, n, eps).unwrap();
        prop_assert_eq!(a.members.to_vec(), b.members.to_vec());
    }

    #[test]
    fn partition_instances_have_equal_pressures(seed in any::<u64>()) {
        let inst = random_symbolic_instance(&mut rng(seed), 8).unwrap();
        let sys = &inst.system;
        let fam = enumerate_family(&sys.space, &sys.model, &inst.psi, inst.eps, 4, 4).unwrap();
        let prep = PreparedCover::from_family(&fam, &inst.z, 4, Variant::Sup).unwrap();
        prop_assert!(prep.is_partition());
        for alpha in [0.0, 0.7] {
            let e = prep.solve(alpha, CoverMode::Exact).unwrap().log_objective;
            let l = prep.solve(alpha, CoverMode::Lp).unwrap().log_objective;
            prop_assert!((e - l).abs() < 1e-9 * (1.0 + e.abs()));
        }
    }
}

#[test]
fn circle_balls_match_bruteforce() {
    let sys = build_circle_multiplication(&[2, 3], 72).unwrap();
    for x in (0..72).step_by(5) {
        for n in 1..4 {
            for eps in [0.013, 0.05, 0.21] {
                let a = dynamical_ball(&sys.model, &sys.space, x, 1, n, eps).unwrap();
                let b = dynamical_ball_bruteforce(&sys.model, &sys.space, x, 1, n, eps).unwrap();
                assert_eq!(a.members.to_vec(), b.members.to_vec());
            }
        }
    }
}
