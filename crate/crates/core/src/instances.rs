//! Seeded random instances for property checks and fuzzing. Every generator
//! takes a ChaCha8 stream, so a single 64-bit seed reproduces a whole batch.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{BallConfig, LemmaInstance, PotentialConfig, SystemConfig, ZSetConfig};
use crate::error::Result;
use crate::pointset::TargetSet;
use crate::space::{FiniteSpace, Potential, System};

/// A system with potential, target set and a radius off the distance
/// spectrum.
#[derive(Clone, Debug)]
pub struct Instance {
    pub system_config: SystemConfig,
    pub system: System,
    pub psi: Potential,
    pub z: TargetSet,
    pub eps: f64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn random_z(rng: &mut ChaCha8Rng, points: usize) -> TargetSet {
    let size = rng.gen_range(1..=points);
    let mut idx: Vec<usize> = (0..points).collect();
    idx.shuffle(rng);
    TargetSet::from_indices(points, idx.into_iter().take(size))
}

/// Radius strictly between two consecutive attained distances.
fn off_spectrum_eps(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> f64 {
    let mut d: Vec<f64> = Vec::new();
    for x in 0..space.len() {
        for y in x + 1..space.len() {
            d.push(space.dist(x, y));
        }
    }
    d.sort_by(f64::total_cmp);
    d.dedup();
    let j = rng.gen_range(0..d.len().saturating_sub(1).max(1));
    let (lo, hi) = if d.len() >= 2 { (d[j], d[j + 1]) } else { (d[0], 2.0 * d[0]) };
    lo + (hi - lo) * rng.gen_range(0.25..0.75)
}

/// Up to 16 points in the unit square with two random maps, `psi` uniform in
/// `[-1, 1]` and a random nonempty `Z`.
pub fn random_explicit_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let p = rng.gen_range(4..=16);
    let pts: Vec<(f64, f64)> = (0..p).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
        .collect();
    let maps: Vec<Vec<u32>> = (0..2).map(|_| (0..p).map(|_| rng.gen_range(0..p as u32)).collect()).collect();
    let system_config = SystemConfig::ExplicitTable { dist, maps };
    let system = system_config.build()?;
    let psi = Potential::table((0..p).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
    let z = random_z(rng, p);
    let eps = off_spectrum_eps(rng, &system.space);
    Ok(Instance {
        system_config,
        system,
        psi,
        z,
        eps,
    })
}

/// Random instance on the 2-shift with `L = len`, `eps = 2^-2` and a
/// first-symbol potential. Same-length balls are cylinders, so every such
/// instance is a partition instance.
pub fn random_symbolic_instance(rng: &mut ChaCha8Rng, len: usize) -> Result<Instance> {
    let system_config = SystemConfig::SymbolicShift { k: 2, len };
    let system = system_config.build()?;
    let phi = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
    let psi = PotentialConfig::FirstSymbol { phi: phi.to_vec() }.build(&system.space)?;
    let z = if rng.gen_bool(0.5) {
        random_z(rng, system.len())
    } else {
        let allowed: Vec<Vec<usize>> = (0..len).map(|_| if rng.gen_bool(0.3) { vec![rng.gen_range(0..2)] } else { vec![0, 1] }).collect();
        ZSetConfig::Product { allowed }.build(&system.space)?
    };
    Ok(Instance {
        system_config,
        system,
        psi,
        z,
        eps: 0.25,
    })
}

/// 3r instance: 2-shift with `L = 10`, radius `2^-3`, lengths in `[1, 6]`.
pub fn random_3r_instance(rng: &mut ChaCha8Rng) -> LemmaInstance {
    let count = rng.gen_range(2..=40);
    LemmaInstance {
        system: SystemConfig::SymbolicShift { k: 2, len: 10 },
        balls: (0..count)
            .map(|_| BallConfig {
                center: rng.gen_range(0..1024),
                n: rng.gen_range(1..=6),
                radius: 0.125,
            })
            .collect(),
        multiplicities: None,
        coefficients: None,
        log_weights: None,
        t: None,
    }
}

/// 5r instance: circle grid `N = 360` with multipliers 2 and 3, a common
/// length in `[1, 3]` and radii in `(0.002, 0.2)`.
pub fn random_5r_instance(rng: &mut ChaCha8Rng) -> LemmaInstance {
    let count = rng.gen_range(2..=40);
    let n = rng.gen_range(1..=3);
    LemmaInstance {
        system: SystemConfig::CircleMult {
            multipliers: vec![2, 3],
            period: None,
            n: 360,
        },
        balls: (0..count)
            .map(|_| BallConfig {
                center: rng.gen_range(0..360),
                n,
                radius: rng.gen_range(0.002..0.2),
            })
            .collect(),
        multiplicities: None,
        coefficients: None,
        log_weights: None,
        t: None,
    }
}

/// Step-1 instance: 2-shift with `L = 8`, common `(n, 2^-2)`, multiplicities
/// in `1..=4`, log weights in `[-2, 2]` and `t` in `(0.5, 4.5)`.
pub fn random_step1_instance(rng: &mut ChaCha8Rng) -> LemmaInstance {
    let count = rng.gen_range(1..=30);
    let n = rng.gen_range(1..=4);
    LemmaInstance {
        system: SystemConfig::SymbolicShift { k: 2, len: 8 },
        balls: (0..count)
            .map(|_| BallConfig {
                center: rng.gen_range(0..256),
                n,
                radius: 0.25,
            })
            .collect(),
        multiplicities: Some((0..count).map(|_| rng.gen_range(1..=4)).collect()),
        coefficients: None,
        log_weights: Some((0..count).map(|_| rng.gen_range(-2.0..=2.0)).collect()),
        t: Some(rng.gen_range(0.5..4.5)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = random_explicit_instance(&mut rng(7)).unwrap();
        let b = random_explicit_instance(&mut rng(7)).unwrap();
        assert_eq!(a.system_config, b.system_config);
        assert_eq!(a.eps, b.eps);
        assert!(!a.system.space.attains_distance(a.eps));
        assert_eq!(random_step1_instance(&mut rng(3)), random_step1_instance(&mut rng(3)));
    }

    #[test]
    fn lemma_instances_build() {
        let mut r = rng(11);
        for inst in [random_3r_instance(&mut r), random_5r_instance(&mut r), random_step1_instance(&mut r)] {
            let sys = inst.system.build().unwrap();
            assert_eq!(inst.build_balls(&sys).unwrap().len(), inst.balls.len());
        }
    }
}
