//! Fractional set cover and its packing dual.
//!
//! Primal: minimize `sum_i c_i w_i` subject to `sum_{i: x in B_i} c_i >= g(x)`,
//! `c >= 0`. Dual: maximize `sum_x g(x) y_x` subject to
//! `sum_{x in B_i} y_x <= w_i`, `y >= 0`.
//!
//! The dual is solved with a dense tableau simplex started from the slack
//! basis (feasible because every `w_i >= 0`); the cover coefficients are read
//! off the slack reduced costs. Pricing is Dantzig's rule until a run of
//! degenerate pivots, after which Bland's rule is used for the rest of the
//! solve, so the method terminates. Each connected component is scaled to
//! unit maximal weight and solved separately.

use crate::error::{Error, Result};
use crate::logsum::log_sum_exp;
use crate::setcover::{reduce, Component, SetCoverInstance};

/// Relative duality gap accepted for a solve.
pub const DUALITY_TOLERANCE: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_RUN: usize = 32;

/// Largest number of sets in one component handed to the dense simplex.
pub const MAX_LP_COLUMNS: usize = 5000;

#[derive(Clone, Debug)]
pub struct FractionalInstance {
    pub n_points: usize,
    /// Strictly increasing local point lists.
    pub sets: Vec<Vec<u32>>,
    pub log_weights: Vec<f64>,
    /// Nonnegative demand per point.
    pub demand: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FractionalSolution {
    /// `ln sum_i c_i w_i`.
    pub log_value: f64,
    /// `ln sum_x g(x) y_x`.
    pub log_dual_value: f64,
    /// Cover coefficient per set.
    pub coefficients: Vec<f64>,
    /// `ln y_x` per point; negative infinity where the price is zero.
    pub log_prices: Vec<f64>,
}

impl FractionalSolution {
    /// `(primal - dual) / primal`.
    pub fn relative_gap(&self) -> f64 {
        if self.log_value == f64::NEG_INFINITY {
            return 0.0;
        }
        -(self.log_dual_value - self.log_value).exp_m1()
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows` rows of `cols + 1` entries, right-hand side last.
    a: Vec<f64>,
    /// Reduced costs, objective value negated in the last slot.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.a[r * w + c] = 1.0;
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (x, &y) in self.cost.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }
}

/// Dense simplex on `max g.y, A y <= w, y >= 0` with `A` given by `sets`
/// over `n` points. Returns (y, pi) where `pi` are the row duals.
fn packing_simplex(n: usize, sets: &[Vec<u32>], w: &[f64], g: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = sets.len();
    let cols = n + m;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * (cols + 1)],
        cost: vec![0.0; cols + 1],
        basis: (n..n + m).collect(),
    };
    for (i, s) in sets.iter().enumerate() {
        let row = i * (cols + 1);
        for &x in s {
            t.a[row + x as usize] = 1.0;
        }
        t.a[row + n + i] = 1.0;
        t.a[row + cols] = w[i];
    }
    t.cost[..n].copy_from_slice(g);

    let max_iter = 20_000 + 200 * (m + n);
    let mut bland = false;
    let mut degenerate = 0;
    for _ in 0..max_iter {
        let entering = if bland {
            (0..cols).find(|&j| t.cost[j] > COST_TOL)
        } else {
            (0..cols)
                .filter(|&j| t.cost[j] > COST_TOL)
                .max_by(|&a, &b| t.cost[a].total_cmp(&t.cost[b]).then(b.cmp(&a)))
        };
        let Some(c) = entering else {
            let mut y = vec![0.0; n];
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n {
                    y[b] = t.at(i, cols).max(0.0);
                }
            }
            let pi = (0..m).map(|i| (-t.cost[n + i]).max(0.0)).collect();
            return Ok((y, pi));
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.rows {
            let aij = t.at(i, c);
            if aij > PIVOT_TOL {
                let ratio = t.at(i, cols).max(0.0) / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best || (ratio == best && t.basis[i] < t.basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, ratio)) = leave else {
            return Err(Error::Solver("packing LP reported unbounded".into()));
        };
        if ratio <= 0.0 {
            degenerate += 1;
            if degenerate >= DEGENERATE_RUN {
                bland = true;
            }
        } else {
            degenerate = 0;
        }
        t.pivot(r, c);
    }
    Err(Error::Solver(format!("simplex did not terminate within {max_iter} pivots")))
}

struct ComponentSolution {
    /// log of scaled primal and dual objectives plus the scale.
    log_primal: f64,
    log_dual: f64,
}

fn solve_component(
    inst: &FractionalInstance,
    support: &[usize],
    comp: &Component,
    coefficients: &mut [f64],
    log_prices: &mut [f64],
) -> Result<ComponentSolution> {
    let t_scale = comp
        .set_ids
        .iter()
        .map(|&i| inst.log_weights[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = comp.set_ids.iter().map(|&i| (inst.log_weights[i] - t_scale).exp()).collect();
    let g_raw: Vec<f64> = comp.points.iter().map(|&x| inst.demand[support[x as usize]]).collect();
    let g_max = g_raw.iter().copied().fold(0.0, f64::max);
    let g: Vec<f64> = g_raw.iter().map(|v| v / g_max).collect();
    let n = comp.n_points;

    let (mut y, mut c) = if comp.sets.len() == 1 {
        // one set holds every point: c = max g, y spread over the argmax points
        let top: Vec<usize> = (0..n).filter(|&x| g[x] == 1.0).collect();
        let mut y = vec![0.0; n];
        for &x in &top {
            y[x] = w[0] / top.len() as f64;
        }
        (y, vec![1.0])
    } else if comp.sets.len() > MAX_LP_COLUMNS {
        return Err(Error::Resource(format!(
            "LP component has {} candidate balls; the dense simplex cap is {MAX_LP_COLUMNS}",
            comp.sets.len()
        )));
    } else {
        packing_simplex(n, &comp.sets, &w, &g)?
    };

    // repair primal feasibility
    let mut cover = vec![0.0; n];
    for (s, set) in comp.sets.iter().enumerate() {
        for &x in set {
            cover[x as usize] += c[s];
        }
    }
    let lift = (0..n)
        .map(|x| if cover[x] > 0.0 { g[x] / cover[x] } else { f64::INFINITY })
        .fold(1.0, f64::max);
    if !lift.is_finite() {
        return Err(Error::Solver("LP cover coefficients leave a demanded point uncovered".into()));
    }
    for v in c.iter_mut() {
        *v *= lift;
    }
    // repair dual feasibility row by row; shrinking never raises another load
    for (s, set) in comp.sets.iter().enumerate() {
        let load: f64 = set.iter().map(|&x| y[x as usize]).sum();
        if load > w[s] {
            let f = w[s] / load;
            for &x in set {
                y[x as usize] *= f;
            }
        }
    }

    let primal: f64 = c.iter().zip(&w).map(|(a, b)| a * b).sum();
    let dual: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
    if primal > 0.0 && (primal - dual) > DUALITY_TOLERANCE * primal {
        return Err(Error::Solver(format!(
            "duality gap {:.3e} above tolerance {DUALITY_TOLERANCE:e}",
            (primal - dual) / primal
        )));
    }
    for (s, &id) in comp.set_ids.iter().enumerate() {
        coefficients[id] = c[s] * g_max;
    }
    for (x, &p) in comp.points.iter().enumerate() {
        log_prices[support[p as usize]] = y[x].ln() + t_scale;
    }
    Ok(ComponentSolution {
        log_primal: primal.ln() + t_scale + g_max.ln(),
        log_dual: dual.ln() + t_scale + g_max.ln(),
    })
}

/// Optimal fractional cover with its packing dual.
pub fn solve_fractional(inst: &FractionalInstance) -> Result<FractionalSolution> {
    if inst.demand.len() != inst.n_points {
        return Err(Error::Input(format!(
            "demand has {} entries for {} points",
            inst.demand.len(),
            inst.n_points
        )));
    }
    if let Some(x) = inst.demand.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Input(format!(
            "demand must be finite and nonnegative; point {x} has {}",
            inst.demand[x]
        )));
    }
    let support: Vec<usize> = (0..inst.n_points).filter(|&x| inst.demand[x] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::Input("demand has empty support".into()));
    }
    let mut local = vec![u32::MAX; inst.n_points];
    for (i, &x) in support.iter().enumerate() {
        local[x] = i as u32;
    }
    let restricted = SetCoverInstance {
        n_points: support.len(),
        sets: inst
            .sets
            .iter()
            .map(|s| s.iter().filter(|&&x| local[x as usize] != u32::MAX).map(|&x| local[x as usize]).collect())
            .collect(),
        log_weights: inst.log_weights.clone(),
    };
    let reduced = match reduce(&restricted, false) {
        Err(Error::Infeasible { point }) => return Err(Error::Infeasible { point: support[point] }),
        other => other?,
    };
    let mut coefficients = vec![0.0; inst.sets.len()];
    let mut log_prices = vec![f64::NEG_INFINITY; inst.n_points];
    let mut primal = Vec::with_capacity(reduced.components.len());
    let mut dual = Vec::with_capacity(reduced.components.len());
    for comp in &reduced.components {
        let s = solve_component(inst, &support, comp, &mut coefficients, &mut log_prices)?;
        primal.push(s.log_primal);
        dual.push(s.log_dual);
    }
    Ok(FractionalSolution {
        log_value: log_sum_exp(&primal),
        log_dual_value: log_sum_exp(&dual),
        coefficients,
        log_prices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcover::{exact, ExactLimits};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_feasible(inst: &FractionalInstance, sol: &FractionalSolution) {
        let mut cover = vec![0.0; inst.n_points];
        for (s, set) in inst.sets.iter().enumerate() {
            assert!(sol.coefficients[s] >= 0.0);
            for &x in set {
                cover[x as usize] += sol.coefficients[s];
            }
            let load: f64 = set.iter().map(|&x| sol.log_prices[x as usize].exp()).sum();
            assert!(load <= inst.log_weights[s].exp() * (1.0 + 1e-9), "dual row {s}: {load}");
        }
        for x in 0..inst.n_points {
            assert!(cover[x] >= inst.demand[x] * (1.0 - 1e-9));
        }
        assert!(sol.relative_gap() <= DUALITY_TOLERANCE);
    }

    #[test]
    fn random_instances_bracketed_by_exact_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..14);
            let k = rng.gen_range(n..n + 16);
            let mut sets: Vec<Vec<u32>> = (0..k)
                .map(|_| (0..n as u32).filter(|_| rng.gen_bool(0.3)).collect::<Vec<_>>())
                .collect();
            for x in 0..n as u32 {
                let s = rng.gen_range(0..k);
                if !sets[s].contains(&x) {
                    sets[s].push(x);
                    sets[s].sort();
                }
            }
            let log_weights: Vec<f64> = (0..k).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let inst = FractionalInstance {
                n_points: n,
                sets: sets.clone(),
                log_weights: log_weights.clone(),
                demand: vec![1.0; n],
            };
            let sol = solve_fractional(&inst).unwrap();
            check_feasible(&inst, &sol);
            let ilp = exact(&SetCoverInstance { n_points: n, sets, log_weights }, &ExactLimits::default()).unwrap();
            assert!(sol.log_value <= ilp.log_value + 1e-9);
            let doubled = FractionalInstance {
                demand: vec![2.0; n],
                ..inst.clone()
            };
            let sol2 = solve_fractional(&doubled).unwrap();
            assert!((sol2.log_value - sol.log_value - 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn odd_cycle_is_fractional() {
        let sets = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let inst = FractionalInstance {
            n_points: 3,
            sets,
            log_weights: vec![0.0; 3],
            demand: vec![1.0; 3],
        };
        let sol = solve_fractional(&inst).unwrap();
        assert!((sol.log_value - 1.5f64.ln()).abs() < 1e-12);
        check_feasible(&inst, &sol);
    }

    #[test]
    fn single_point_takes_cheapest_set() {
        let inst = FractionalInstance {
            n_points: 3,
            sets: vec![vec![0, 1], vec![1], vec![1, 2]],
            log_weights: vec![0.5, 0.2, -0.3],
            demand: vec![0.0, 1.0, 0.0],
        };
        let sol = solve_fractional(&inst).unwrap();
        assert!((sol.log_value + 0.3).abs() < 1e-12);
        assert_eq!(sol.coefficients[2], 1.0);
        assert!((sol.log_prices[1] + 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_demand() {
        let base = FractionalInstance {
            n_points: 2,
            sets: vec![vec![0]],
            log_weights: vec![0.0],
            demand: vec![1.0, -1.0],
        };
        assert!(matches!(solve_fractional(&base), Err(Error::Input(_))));
        let uncovered = FractionalInstance {
            demand: vec![1.0, 1.0],
            ..base.clone()
        };
        assert!(matches!(solve_fractional(&uncovered), Err(Error::Infeasible { point: 1 })));
        let empty = FractionalInstance {
            demand: vec![0.0, 0.0],
            ..base
        };
        assert!(matches!(solve_fractional(&empty), Err(Error::Input(_))));
    }

    #[test]
    fn wide_weight_spread() {
        // nested chain with weights spanning e^{-40}..e^{0}
        let sets: Vec<Vec<u32>> = (0..8).map(|j| (0..(8 - j) as u32).collect()).collect();
        let log_weights: Vec<f64> = (0..8).map(|j| -5.0 * j as f64).collect();
        let inst = FractionalInstance {
            n_points: 8,
            sets,
            log_weights,
            demand: vec![1.0; 8],
        };
        let sol = solve_fractional(&inst).unwrap();
        check_feasible(&inst, &sol);
        assert!(sol.log_value.abs() < 1e-12);
    }
}
