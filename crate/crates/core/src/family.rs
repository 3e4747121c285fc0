//! Complete enumeration of the dynamical balls `B_n(x, eps)`, `n_min <= n <= n_max`,
//! with cached Birkhoff data. This is the universe every cover program
//! optimizes over.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::pointset::PointSet;
use crate::space::{ball_chain, symbolic_ball_depth, BallSpec, FiniteSpace, NdsModel, Potential};

/// One enumerated ball with `s_i = S_{1,n} psi(x, eps)` (sup over the ball)
/// and `s_i^c = S_{1,n} psi(x)` (value at the center).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyBall {
    pub ball: BallSpec,
    pub sup_sum: f64,
    pub center_sum: f64,
}

impl FamilyBall {
    pub fn length(&self) -> usize {
        self.ball.length
    }
}

/// All balls `B_n(x, eps)` for every center `x` and every `n` in range,
/// stored length-major: index `(n - n_min) * P + x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub eps: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub points: usize,
    pub balls: Vec<FamilyBall>,
}

impl BallFamily {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn index_of(&self, center: usize, n: usize) -> usize {
        (n - self.n_min) * self.points + center
    }

    pub fn get(&self, center: usize, n: usize) -> &FamilyBall {
        &self.balls[self.index_of(center, n)]
    }

    /// Indices of the balls with length at least `n_start`.
    pub fn indices_from(&self, n_start: usize) -> std::ops::Range<usize> {
        let first = n_start.clamp(self.n_min, self.n_max + 1) - self.n_min;
        (first * self.points)..self.balls.len()
    }
}

/// Checks the symbolic truncation regime `n + m <= L`, where `m` is the
/// number of extra coordinates pinned by the radius.
pub fn check_symbolic_regime(model: &NdsModel, eps: f64, n_max: usize) -> Result<()> {
    if let Some((_, len)) = model.symbolic() {
        let c1 = symbolic_ball_depth(len, eps, 1);
        if c1 > 0 && c1 + n_max - 1 > len {
            return input(format!(
                "symbolic regime violated: n_max + m = {} exceeds word length L = {len} at eps = {eps}",
                c1 + n_max - 1
            ));
        }
    }
    Ok(())
}

pub fn enumerate_family(space: &FiniteSpace, model: &NdsModel, psi: &Potential, eps: f64, n_min: usize, n_max: usize) -> Result<BallFamily> {
    if n_min < 1 || n_max < n_min {
        return input(format!("need 1 <= n_min <= n_max, got n_min={n_min}, n_max={n_max}"));
    }
    if !(eps > 0.0) {
        return input(format!("ball radius must be positive, got {eps}"));
    }
    if psi.len() != space.len() {
        return input(format!("potential has {} values, space has {} points", psi.len(), space.len()));
    }
    check_symbolic_regime(model, eps, n_max)?;
    let p = space.len();
    let mut balls = Vec::with_capacity(p * (n_max - n_min + 1));

    if let Some((k, len)) = model.symbolic() {
        let mut pos: Vec<usize> = (0..p).collect();
        let mut acc = vec![0.0; p];
        for n in 1..=n_max {
            for (a, &y) in acc.iter_mut().zip(&pos) {
                *a += psi.at(y);
            }
            if n >= n_min {
                let depth = symbolic_ball_depth(len, eps, n);
                let block = k.pow((len - depth) as u32);
                for (c, chunk) in acc.chunks(block).enumerate() {
                    let sup = chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let members = PointSet::range(c * block, (c + 1) * block);
                    for (off, &center_sum) in chunk.iter().enumerate() {
                        balls.push(FamilyBall {
                            ball: BallSpec {
                                center: c * block + off,
                                start: 1,
                                length: n,
                                radius: eps,
                                members: members.clone(),
                            },
                            sup_sum: sup,
                            center_sum,
                        });
                    }
                }
            }
            if n < n_max {
                for y in pos.iter_mut() {
                    *y = model.apply(n, *y);
                }
            }
        }
    } else {
        let sums = crate::space::birkhoff_table(model, psi, 1, n_max);
        let chains: Vec<Vec<PointSet>> = (0..p)
            .into_par_iter()
            .map(|x| ball_chain(model, space, x, 1, eps, n_max))
            .collect();
        for n in n_min..=n_max {
            let s = &sums[n - 1];
            for (x, chain) in chains.iter().enumerate() {
                let members = chain[n - 1].clone();
                let sup = members.iter().map(|y| s[y]).fold(f64::NEG_INFINITY, f64::max);
                balls.push(FamilyBall {
                    ball: BallSpec {
                        center: x,
                        start: 1,
                        length: n,
                        radius: eps,
                        members,
                    },
                    sup_sum: sup,
                    center_sum: s[x],
                });
            }
        }
    }
    Ok(BallFamily {
        eps,
        n_min,
        n_max,
        points: p,
        balls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_circle_multiplication, build_symbolic_shift, dynamical_ball_bruteforce, modulus_of_continuity};

    #[test]
    fn full_shift_family_sizes() {
        let sys = build_symbolic_shift(2, 6).unwrap();
        let fam = enumerate_family(&sys.space, &sys.model, &Potential::zero(64), 0.25, 1, 4).unwrap();
        assert_eq!(fam.len(), 4 * 64);
        for n in 1..=4 {
            for x in 0..64 {
                let b = fam.get(x, n);
                assert_eq!(b.ball.members.len(), 1 << (6 - (n + 2)));
                assert_eq!(b.sup_sum, 0.0);
            }
        }
        assert!(enumerate_family(&sys.space, &sys.model, &Potential::zero(64), 0.25, 1, 5).is_err());
    }

    #[test]
    fn single_length_has_one_ball_per_center() {
        let sys = build_circle_multiplication(&[2, 3], 36).unwrap();
        let fam = enumerate_family(&sys.space, &sys.model, &Potential::zero(36), 0.1, 3, 3).unwrap();
        assert_eq!(fam.len(), 36);
        assert_eq!(fam.indices_from(3), 0..36);
        assert_eq!(fam.indices_from(4), 36..36);
    }

    #[test]
    fn cached_sums_respect_sandwich() {
        let sys = build_circle_multiplication(&[2, 3], 72).unwrap();
        let psi = Potential::table((0..72).map(|j| (j as f64 / 72.0 * std::f64::consts::TAU).cos()).collect()).unwrap();
        let eps = 0.07;
        let lam = modulus_of_continuity(&sys.space, &psi, eps);
        let fam = enumerate_family(&sys.space, &sys.model, &psi, eps, 1, 4).unwrap();
        for b in &fam.balls {
            let n = b.length() as f64;
            assert!(b.center_sum <= b.sup_sum + 1e-12);
            assert!(b.sup_sum <= b.center_sum + n * lam + 1e-12);
            let brute = dynamical_ball_bruteforce(&sys.model, &sys.space, b.ball.center, 1, b.length(), eps).unwrap();
            assert_eq!(brute.members, b.ball.members);
        }
    }
}
