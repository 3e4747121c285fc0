//! Weighted set cover over a local universe `0..n_points`.
//!
//! Weights are given in log form (`t_i`, weight `e^{t_i}`) because cover
//! weights `e^{-alpha n + s}` span many orders of magnitude.
//!
//! The exact solver first applies reductions that never change the optimum:
//! identical sets keep their cheapest copy, a set contained in a no-dearer set
//! is dropped, a point covered by a single set forces that set, and the
//! residual instance splits into connected components. Each component is
//! then solved by branch-and-bound with a dual-feasible (LP) lower bound.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::logsum::log_sum_exp;

#[derive(Clone, Debug)]
pub struct SetCoverInstance {
    pub n_points: usize,
    /// Strictly increasing local point lists.
    pub sets: Vec<Vec<u32>>,
    pub log_weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetCoverSolution {
    pub log_value: f64,
    /// Indices into the instance's `sets`, ascending.
    pub chosen: Vec<usize>,
}

/// Caps for the exact solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    /// Largest number of candidate sets in one component after reductions.
    pub max_candidates: usize,
    pub max_nodes: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_candidates: 64,
            max_nodes: 1 << 22,
        }
    }
}

impl SetCoverInstance {
    fn solution(&self, mut chosen: Vec<usize>) -> SetCoverSolution {
        chosen.sort_unstable();
        chosen.dedup();
        let ts: Vec<f64> = chosen.iter().map(|&i| self.log_weights[i]).collect();
        SetCoverSolution {
            log_value: log_sum_exp(&ts),
            chosen,
        }
    }

    /// First point that no set contains.
    pub fn uncovered_point(&self) -> Option<usize> {
        let mut seen = vec![false; self.n_points];
        for s in &self.sets {
            for &x in s {
                seen[x as usize] = true;
            }
        }
        seen.iter().position(|&b| !b)
    }

    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![false; self.n_points];
        for &i in chosen {
            for &x in &self.sets[i] {
                seen[x as usize] = true;
            }
        }
        seen.iter().all(|&b| b)
    }
}

#[derive(PartialEq)]
struct Key {
    log_ratio: f64,
    idx: usize,
    count: usize,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap and we want the smallest ratio
        other
            .log_ratio
            .total_cmp(&self.log_ratio)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy cover: repeatedly take the set minimizing weight per newly covered
/// point, ties to the smaller index.
pub fn greedy(inst: &SetCoverInstance) -> Result<SetCoverSolution> {
    if let Some(p) = inst.uncovered_point() {
        return Err(Error::Infeasible { point: p });
    }
    let mut covered = vec![false; inst.n_points];
    let mut left = inst.n_points;
    let mut heap: BinaryHeap<Key> = inst
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(idx, s)| Key {
            log_ratio: inst.log_weights[idx] - (s.len() as f64).ln(),
            idx,
            count: s.len(),
        })
        .collect();
    let mut chosen = Vec::new();
    while left > 0 {
        let Some(top) = heap.pop() else {
            return Err(Error::Consistency("greedy ran out of sets before covering".into()));
        };
        let set = &inst.sets[top.idx];
        let count = set.iter().filter(|&&x| !covered[x as usize]).count();
        if count == 0 {
            continue;
        }
        if count == top.count {
            for &x in set {
                if !covered[x as usize] {
                    covered[x as usize] = true;
                    left -= 1;
                }
            }
            chosen.push(top.idx);
        } else {
            heap.push(Key {
                log_ratio: inst.log_weights[top.idx] - (count as f64).ln(),
                idx: top.idx,
                count,
            });
        }
    }
    Ok(inst.solution(chosen))
}

fn is_subset_sorted(a: &[u32], b: &[u32]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Residual instance after the exact reductions.
#[derive(Clone, Debug)]
pub struct Reduced {
    /// Sets forced into every optimal cover.
    pub forced: Vec<usize>,
    /// Independent residual components.
    pub components: Vec<Component>,
}

#[derive(Clone, Debug)]
pub struct Component {
    /// Instance point of each component-local point.
    pub points: Vec<u32>,
    pub set_ids: Vec<usize>,
    pub sets: Vec<Vec<u32>>,
    pub n_points: usize,
}

/// Drops duplicate and dominated sets, takes forced sets (when
/// `take_forced`), and splits the rest into connected components. Without
/// forced sets every step also preserves the fractional optimum.
pub fn reduce(inst: &SetCoverInstance, take_forced: bool) -> Result<Reduced> {
    if let Some(p) = inst.uncovered_point() {
        return Err(Error::Infeasible { point: p });
    }
    let w = &inst.log_weights;
    let better = |a: usize, b: usize| w[a] < w[b] || (w[a] == w[b] && a < b);
    let mut sets: Vec<Vec<u32>> = inst.sets.clone();
    let mut alive: Vec<bool> = sets.iter().map(|s| !s.is_empty()).collect();
    let mut covered = vec![false; inst.n_points];
    let mut forced = Vec::new();

    loop {
        // duplicates
        let mut first: HashMap<&[u32], usize> = HashMap::new();
        let mut dropped = Vec::new();
        for i in (0..sets.len()).filter(|&i| alive[i]) {
            match first.get(sets[i].as_slice()) {
                Some(&j) if better(j, i) => dropped.push(i),
                Some(&j) => {
                    dropped.push(j);
                    first.insert(sets[i].as_slice(), i);
                }
                None => {
                    first.insert(sets[i].as_slice(), i);
                }
            }
        }
        std::mem::drop(first);
        for i in dropped {
            alive[i] = false;
        }

        let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); inst.n_points];
        for i in (0..sets.len()).filter(|&i| alive[i]) {
            for &x in &sets[i] {
                incidence[x as usize].push(i);
            }
        }

        // dominance: A inside a strictly larger set B with w_B <= w_A
        let mut changed = false;
        for a in 0..sets.len() {
            if !alive[a] {
                continue;
            }
            let pivot = *sets[a].iter().min_by_key(|&&x| incidence[x as usize].len()).unwrap();
            let dominated = incidence[pivot as usize].iter().any(|&b| {
                b != a && alive[b] && sets[b].len() > sets[a].len() && w[b] <= w[a] && is_subset_sorted(&sets[a], &sets[b])
            });
            if dominated {
                alive[a] = false;
                changed = true;
            }
        }
        if changed {
            continue;
        }

        // forced sets
        let mut newly = Vec::new();
        for (x, inc) in incidence.iter().enumerate() {
            if covered[x] {
                continue;
            }
            let live: Vec<usize> = inc.iter().copied().filter(|&i| alive[i]).collect();
            match live.len() {
                0 => return Err(Error::Infeasible { point: x }),
                1 => newly.push(live[0]),
                _ => {}
            }
        }
        if newly.is_empty() || !take_forced {
            break;
        }
        newly.sort_unstable();
        newly.dedup();
        for &i in &newly {
            for &x in &sets[i] {
                covered[x as usize] = true;
            }
            alive[i] = false;
            forced.push(i);
        }
        for i in 0..sets.len() {
            if alive[i] {
                sets[i].retain(|&x| !covered[x as usize]);
                if sets[i].is_empty() {
                    alive[i] = false;
                }
            }
        }
    }

    // connected components of the residual instance
    let mut parent: Vec<usize> = (0..inst.n_points).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in (0..sets.len()).filter(|&i| alive[i]) {
        let r0 = find(&mut parent, sets[i][0] as usize);
        for &x in &sets[i][1..] {
            let r = find(&mut parent, x as usize);
            if r != r0 {
                parent[r] = r0;
            }
        }
    }
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<Component> = Vec::new();
    let mut local = vec![u32::MAX; inst.n_points];
    for x in 0..inst.n_points {
        if covered[x] {
            continue;
        }
        let r = find(&mut parent, x);
        let c = *by_root.entry(r).or_insert_with(|| {
            components.push(Component {
                points: Vec::new(),
                set_ids: Vec::new(),
                sets: Vec::new(),
                n_points: 0,
            });
            components.len() - 1
        });
        local[x] = components[c].n_points as u32;
        components[c].n_points += 1;
        components[c].points.push(x as u32);
    }
    for i in (0..sets.len()).filter(|&i| alive[i]) {
        let r = find(&mut parent, sets[i][0] as usize);
        let c = by_root[&r];
        components[c].set_ids.push(i);
        components[c].sets.push(sets[i].iter().map(|&x| local[x as usize]).collect());
    }
    forced.sort_unstable();
    Ok(Reduced { forced, components })
}

struct Search<'a> {
    masks: Vec<Vec<u64>>,
    weights: Vec<f64>,
    incidence: Vec<Vec<usize>>,
    best: f64,
    best_set: Vec<usize>,
    nodes: u64,
    limits: &'a ExactLimits,
}

fn any_bits(v: &[u64]) -> bool {
    v.iter().any(|&w| w != 0)
}

fn count_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

impl Search<'_> {
    fn run(&mut self, uncovered: &[u64], cost: f64, banned: u64, chosen: &mut Vec<usize>) -> Result<()> {
        if !any_bits(uncovered) {
            if cost < self.best {
                self.best = cost;
                self.best_set = chosen.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(Error::Resource(format!(
                "exact cover explored more than {} branch-and-bound nodes (cap)",
                self.limits.max_nodes
            )));
        }
        // y_x = min over usable sets of w_s / |s ∩ U| is dual feasible
        let mut bound = cost;
        let mut pivot = None;
        let mut pivot_deg = usize::MAX;
        for (wi, &word) in uncovered.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let x = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut y = f64::INFINITY;
                let mut deg = 0;
                for &s in &self.incidence[x] {
                    if banned >> s & 1 == 1 {
                        continue;
                    }
                    deg += 1;
                    let c = count_and(&self.masks[s], uncovered) as f64;
                    y = y.min(self.weights[s] / c);
                }
                if deg == 0 {
                    return Ok(());
                }
                bound += y;
                if deg < pivot_deg {
                    pivot_deg = deg;
                    pivot = Some(x);
                }
            }
        }
        if bound >= self.best * (1.0 - 1e-12) {
            return Ok(());
        }
        let x = pivot.unwrap();
        let mut options: Vec<(f64, usize)> = self.incidence[x]
            .iter()
            .filter(|&&s| banned >> s & 1 == 0)
            .map(|&s| (self.weights[s] / count_and(&self.masks[s], uncovered) as f64, s))
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut ban = banned;
        let mut next = uncovered.to_vec();
        for (_, s) in options {
            for (n, (u, m)) in next.iter_mut().zip(uncovered.iter().zip(&self.masks[s])) {
                *n = u & !m;
            }
            chosen.push(s);
            self.run(&next, cost + self.weights[s], ban, chosen)?;
            chosen.pop();
            ban |= 1 << s;
        }
        Ok(())
    }
}

/// Parent links when the component's sets are laminar (any two are
/// disjoint or nested), in decreasing-size processing order.
fn laminar_forest(comp: &Component) -> Option<(Vec<usize>, Vec<Option<usize>>)> {
    let mut order: Vec<usize> = (0..comp.sets.len()).collect();
    order.sort_by(|&a, &b| comp.sets[b].len().cmp(&comp.sets[a].len()).then(a.cmp(&b)));
    let mut owner: Vec<Option<usize>> = vec![None; comp.n_points];
    let mut parent = vec![None; comp.sets.len()];
    for &s in &order {
        let set = &comp.sets[s];
        let p = owner[set[0] as usize];
        if set.iter().any(|&x| owner[x as usize] != p) {
            return None;
        }
        parent[s] = p;
        for &x in set {
            owner[x as usize] = Some(s);
        }
    }
    Some((order, parent))
}

/// Exact optimum on a laminar component: each set either is taken or is
/// replaced by optimal covers of its maximal proper subsets.
fn solve_laminar(inst: &SetCoverInstance, comp: &Component, order: &[usize], parent: &[Option<usize>]) -> Vec<usize> {
    let k = comp.sets.len();
    let t: Vec<f64> = comp.set_ids.iter().map(|&i| inst.log_weights[i]).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut roots = Vec::new();
    for &s in order {
        match parent[s] {
            Some(p) => children[p].push(s),
            None => roots.push(s),
        }
    }
    let mut cost = vec![0.0; k];
    let mut take = vec![true; k];
    for &s in order.iter().rev() {
        cost[s] = t[s];
        let covered: usize = children[s].iter().map(|&c| comp.sets[c].len()).sum();
        if covered == comp.sets[s].len() {
            let split = log_sum_exp(&children[s].iter().map(|&c| cost[c]).collect::<Vec<_>>());
            if split < t[s] {
                cost[s] = split;
                take[s] = false;
            }
        }
    }
    let mut chosen = Vec::new();
    let mut stack = roots;
    while let Some(s) = stack.pop() {
        if take[s] {
            chosen.push(comp.set_ids[s]);
        } else {
            stack.extend(&children[s]);
        }
    }
    chosen
}

fn solve_component(inst: &SetCoverInstance, comp: &Component, limits: &ExactLimits, nodes: &mut u64) -> Result<Vec<usize>> {
    if comp.sets.len() == 1 {
        return Ok(vec![comp.set_ids[0]]);
    }
    if let Some((order, parent)) = laminar_forest(comp) {
        return Ok(solve_laminar(inst, comp, &order, &parent));
    }
    if comp.sets.len() > limits.max_candidates.min(64) {
        return Err(Error::Resource(format!(
            "exact cover component has {} candidate balls after dominance pruning; cap is {}",
            comp.sets.len(),
            limits.max_candidates
        )));
    }
    let words = comp.n_points.div_ceil(64);
    let t_max = comp.set_ids.iter().map(|&i| inst.log_weights[i]).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = comp.set_ids.iter().map(|&i| (inst.log_weights[i] - t_max).exp()).collect();
    let mut masks = vec![vec![0u64; words]; comp.sets.len()];
    let mut incidence = vec![Vec::new(); comp.n_points];
    for (s, set) in comp.sets.iter().enumerate() {
        for &x in set {
            masks[s][x as usize / 64] |= 1 << (x % 64);
            incidence[x as usize].push(s);
        }
    }
    let sub = SetCoverInstance {
        n_points: comp.n_points,
        sets: comp.sets.clone(),
        log_weights: comp.set_ids.iter().map(|&i| inst.log_weights[i]).collect(),
    };
    let start = greedy(&sub)?;
    let start_cost: f64 = start.chosen.iter().map(|&s| weights[s]).sum();
    let mut search = Search {
        masks,
        weights,
        incidence,
        best: start_cost,
        best_set: start.chosen,
        nodes: *nodes,
        limits,
    };
    let mut full = vec![0u64; words];
    for x in 0..comp.n_points {
        full[x / 64] |= 1 << (x % 64);
    }
    search.run(&full, 0.0, 0, &mut Vec::new())?;
    *nodes = search.nodes;
    Ok(search.best_set.iter().map(|&s| comp.set_ids[s]).collect())
}

/// Minimum-weight cover.
pub fn exact(inst: &SetCoverInstance, limits: &ExactLimits) -> Result<SetCoverSolution> {
    let reduced = reduce(inst, true)?;
    let mut chosen = reduced.forced.clone();
    let mut nodes = 0;
    for comp in &reduced.components {
        chosen.extend(solve_component(inst, comp, limits, &mut nodes)?);
    }
    Ok(inst.solution(chosen))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive minimum over all subfamilies.
    pub(crate) fn brute_force(inst: &SetCoverInstance) -> Option<f64> {
        let k = inst.sets.len();
        assert!(k <= 20);
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << k) {
            let chosen: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            if inst.is_cover(&chosen) {
                let v = log_sum_exp(&chosen.iter().map(|&i| inst.log_weights[i]).collect::<Vec<_>>());
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        best
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> SetCoverInstance {
        let n = rng.gen_range(1..12);
        let k = rng.gen_range(1..14);
        let mut sets: Vec<Vec<u32>> = (0..k)
            .map(|_| {
                let mut s: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.3)).collect();
                if s.is_empty() {
                    s.push(rng.gen_range(0..n as u32));
                }
                s
            })
            .collect();
        if rng.gen_bool(0.3) {
            let dup = sets[0].clone();
            sets.push(dup);
        }
        let log_weights = sets.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
        SetCoverInstance { n_points: n, sets, log_weights }
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..400 {
            let inst = random_instance(&mut rng);
            match brute_force(&inst) {
                None => assert!(matches!(exact(&inst, &ExactLimits::default()), Err(Error::Infeasible { .. }))),
                Some(best) => {
                    let sol = exact(&inst, &ExactLimits::default()).unwrap();
                    assert!(inst.is_cover(&sol.chosen));
                    assert!((sol.log_value - best).abs() < 1e-9, "{} vs {}", sol.log_value, best);
                    let g = greedy(&inst).unwrap();
                    assert!(inst.is_cover(&g.chosen));
                    assert!(g.log_value >= best - 1e-9);
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn laminar_families_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            // binary cylinders over 3 digits plus a few random weights
            let mut sets = Vec::new();
            for depth in 0..=3u32 {
                let block = 8 >> depth;
                for c in 0..(1u32 << depth) {
                    if depth == 3 || rng.gen_bool(0.6) {
                        sets.push((c * block..(c + 1) * block).collect::<Vec<u32>>());
                    }
                }
            }
            let log_weights = sets.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
            let inst = SetCoverInstance { n_points: 8, sets, log_weights };
            let best = brute_force(&inst).unwrap();
            let sol = exact(&inst, &ExactLimits { max_candidates: 0, max_nodes: 0 }).unwrap();
            assert!(inst.is_cover(&sol.chosen));
            assert!((sol.log_value - best).abs() < 1e-9);
        }
    }

    #[test]
    fn partition_is_solved_by_reductions() {
        let sets: Vec<Vec<u32>> = (0..1000u32).map(|i| vec![i]).collect();
        let inst = SetCoverInstance {
            n_points: 1000,
            log_weights: vec![0.0; 1000],
            sets,
        };
        let red = reduce(&inst, true).unwrap();
        assert_eq!(red.forced.len(), 1000);
        assert!(red.components.is_empty());
        let sol = exact(&inst, &ExactLimits::default()).unwrap();
        assert!((sol.log_value - 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn greedy_tie_break_prefers_lower_index() {
        let inst = SetCoverInstance {
            n_points: 2,
            sets: vec![vec![0, 1], vec![0, 1]],
            log_weights: vec![0.0, 0.0],
        };
        assert_eq!(greedy(&inst).unwrap().chosen, vec![0]);
    }

    #[test]
    fn candidate_cap_is_reported() {
        // a cycle of 70 two-point sets has no reductions
        let n = 70u32;
        let sets: Vec<Vec<u32>> = (0..n).map(|i| {
            let mut s = vec![i, (i + 1) % n];
            s.sort();
            s
        }).collect();
        let inst = SetCoverInstance {
            n_points: n as usize,
            log_weights: vec![0.0; n as usize],
            sets,
        };
        let err = exact(&inst, &ExactLimits::default()).unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("64")));
        let small = ExactLimits { max_candidates: 64, max_nodes: 0 };
        let cyc: Vec<Vec<u32>> = (0..30u32).map(|i| {
            let mut s = vec![i, (i + 1) % 30];
            s.sort();
            s
        }).collect();
        let inst = SetCoverInstance { n_points: 30, log_weights: vec![0.0; 30], sets: cyc };
        assert!(matches!(exact(&inst, &small), Err(Error::Resource(_))));
        assert!((exact(&inst, &ExactLimits::default()).unwrap().log_value - 15f64.ln()).abs() < 1e-12);
    }
}
