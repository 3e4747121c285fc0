//! Greedy disjoint subfamilies of dynamical balls with enlargement
//! certificates.
//!
//! Every operation re-verifies its output before returning: selected balls
//! must be pairwise disjoint and every input ball (or every point of the
//! target set, for the weighted selection) must lie in the recomputed enlargement of its
//! certified ball. A failed check is a [`Error::Consistency`] error.

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::logsum::{log_sum_exp, log_weighted_sum_exp};
use crate::space::{dynamical_ball, BallSpec, FiniteSpace, NdsModel};

/// Denominator used to round real coefficients up to integers.
pub const DEFAULT_DENOMINATOR: u64 = 1 << 16;

#[derive(Clone, Debug, Serialize)]
pub struct CoveringResult {
    /// Indices of the selected balls, in selection order.
    pub selected: Vec<usize>,
    pub enlargement_factor: u32,
    /// For every input ball, the selected ball whose enlargement holds it.
    pub certificate: Vec<usize>,
    /// Vitali only: whether the factor 3 also works (checked when all radii
    /// are equal).
    pub three_r_valid: Option<bool>,
}

fn check_start(balls: &[BallSpec]) -> Result<()> {
    if let Some(b) = balls.iter().find(|b| b.start != 1) {
        return input(format!("ball centered at {} starts at time {}, expected 1", b.center, b.start));
    }
    Ok(())
}

/// Greedy selection in `order`: a ball is kept when it misses every kept
/// ball, otherwise it is certified to the earliest kept ball it meets.
fn greedy_disjoint(points: usize, balls: &[BallSpec], order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut owner = vec![usize::MAX; points];
    let mut selected = Vec::new();
    let mut certificate = vec![usize::MAX; balls.len()];
    for &i in order {
        let hit = balls[i]
            .members
            .iter()
            .filter(|&x| owner[x] != usize::MAX)
            .map(|x| owner[x])
            .min();
        match hit {
            Some(rank) => certificate[i] = selected[rank],
            None => {
                for x in balls[i].members.iter() {
                    owner[x] = selected.len();
                }
                certificate[i] = i;
                selected.push(i);
            }
        }
    }
    (selected, certificate)
}

fn verify_disjoint(points: usize, balls: &[BallSpec], selected: &[usize]) -> Result<()> {
    let mut seen = vec![false; points];
    for &i in selected {
        for x in balls[i].members.iter() {
            if seen[x] {
                return Err(Error::Consistency(format!("selected balls overlap at point {x}")));
            }
            seen[x] = true;
        }
    }
    Ok(())
}

/// Recomputed enlargement `B_n(x, factor * r)` of a ball, as a bitmap.
fn enlargement(space: &FiniteSpace, model: &NdsModel, b: &BallSpec, factor: f64) -> Result<Vec<bool>> {
    let big = dynamical_ball(model, space, b.center, 1, b.length, factor * b.radius)?;
    let mut m = vec![false; space.len()];
    for x in big.members.iter() {
        m[x] = true;
    }
    Ok(m)
}

fn certificates_hold(space: &FiniteSpace, model: &NdsModel, balls: &[BallSpec], result: &CoveringResult, factor: f64) -> Result<bool> {
    let mut cache: std::collections::HashMap<usize, Vec<bool>> = std::collections::HashMap::new();
    for (i, b) in balls.iter().enumerate() {
        let s = result.certificate[i];
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(s) {
            e.insert(enlargement(space, model, &balls[s], factor)?);
        }
        let big = &cache[&s];
        if !b.members.iter().all(|x| big[x]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// 3r covering lemma with a caller-chosen tie order: balls are processed by
/// ascending length, ties in the order they appear in `order`.
pub fn three_r_disjointify_ordered(space: &FiniteSpace, model: &NdsModel, balls: &[BallSpec], order: &[usize]) -> Result<CoveringResult> {
    check_start(balls)?;
    if let Some(b) = balls.iter().find(|b| b.radius != balls[0].radius) {
        return input(format!("radius {} differs from the common radius {}", b.radius, balls[0].radius));
    }
    let mut order = order.to_vec();
    order.sort_by_key(|&i| balls[i].length);
    let (selected, certificate) = greedy_disjoint(space.len(), balls, &order);
    let result = CoveringResult {
        selected,
        enlargement_factor: 3,
        certificate,
        three_r_valid: None,
    };
    verify_disjoint(space.len(), balls, &result.selected)?;
    if !certificates_hold(space, model, balls, &result, 3.0)? {
        return Err(Error::Consistency("a ball escapes the 3r enlargement of its certificate".into()));
    }
    Ok(result)
}

/// Disjoint subfamily of balls of common radius and any lengths whose
/// 3r-enlargements (at their own lengths) cover every input ball.
pub fn three_r_disjointify(space: &FiniteSpace, model: &NdsModel, balls: &[BallSpec]) -> Result<CoveringResult> {
    let order: Vec<usize> = (0..balls.len()).collect();
    three_r_disjointify_ordered(space, model, balls, &order)
}

/// Vitali 5r lemma for balls of a fixed length and varying radii.
pub fn vitali_5r(space: &FiniteSpace, model: &NdsModel, balls: &[BallSpec]) -> Result<CoveringResult> {
    check_start(balls)?;
    if let Some(b) = balls.iter().find(|b| b.length != balls[0].length) {
        return input(format!("length {} differs from the common length {}", b.length, balls[0].length));
    }
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| balls[b].radius.total_cmp(&balls[a].radius).then(a.cmp(&b)));
    let (selected, certificate) = greedy_disjoint(space.len(), balls, &order);
    let mut result = CoveringResult {
        selected,
        enlargement_factor: 5,
        certificate,
        three_r_valid: None,
    };
    verify_disjoint(space.len(), balls, &result.selected)?;
    if !certificates_hold(space, model, balls, &result, 5.0)? {
        return Err(Error::Consistency("a ball escapes the 5r enlargement of its certificate".into()));
    }
    if balls.iter().all(|b| b.radius == balls[0].radius) {
        let ok = certificates_hold(space, model, balls, &result, 3.0)?;
        if !ok {
            return Err(Error::Consistency("equal radii but the 3r certificate fails".into()));
        }
        result.three_r_valid = Some(true);
    }
    Ok(result)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedSelection {
    /// The index set `J`.
    pub selected: Vec<usize>,
    pub threshold: f64,
    /// Number of extraction rounds `m = ceil(t)`.
    pub rounds: u64,
    /// Round whose selection is returned (1-based).
    pub chosen_round: u64,
    /// `Z_t = {x : sum_i c_i chi_{B_i}(x) > t}`.
    pub z_t: Vec<usize>,
    /// For each point of `Z_t`, the ball of `J` whose 5-fold enlargement holds it.
    pub witness: Vec<usize>,
    /// `ln sum_{i in J} w_i`.
    #[serde(serialize_with = "crate::output::f64")]
    pub lhs_log: f64,
    /// `ln ((1/t) sum_i c_i w_i)`.
    #[serde(serialize_with = "crate::output::f64")]
    pub rhs_log: f64,
}

/// Extracts `m = ceil(t)` Vitali rounds from the family with multiplicities
/// `c`, lowering the multiplicity of each selected ball by one per round, and
/// returns the cheapest round.
pub fn integer_weight_disjointify(
    space: &FiniteSpace,
    model: &NdsModel,
    balls: &[BallSpec],
    multiplicities: &[u64],
    log_weights: &[f64],
    t: f64,
) -> Result<WeightedSelection> {
    check_start(balls)?;
    if multiplicities.len() != balls.len() || log_weights.len() != balls.len() {
        return input("one multiplicity and one weight per ball are required");
    }
    if multiplicities.contains(&0) {
        return input("multiplicities must be positive integers");
    }
    if !(t > 0.0 && t.is_finite()) {
        return input(format!("threshold must be positive, got {t}"));
    }
    if let Some(b) = balls.iter().find(|b| b.length != balls[0].length || b.radius != balls[0].radius) {
        return input(format!("ball centered at {} does not share the common (n, eps)", b.center));
    }
    let p = space.len();
    let mut stack = vec![0u64; p];
    for (b, &c) in balls.iter().zip(multiplicities) {
        for x in b.members.iter() {
            stack[x] += c;
        }
    }
    let z_t: Vec<usize> = (0..p).filter(|&x| stack[x] as f64 > t).collect();
    let terms: Vec<(f64, f64)> = multiplicities.iter().zip(log_weights).map(|(&c, &w)| (c as f64, w)).collect();
    let rhs_log = log_weighted_sum_exp(&terms) - t.ln();
    let rounds = t.ceil() as u64;
    if z_t.is_empty() {
        return Ok(WeightedSelection {
            selected: Vec::new(),
            threshold: t,
            rounds,
            chosen_round: 0,
            z_t,
            witness: Vec::new(),
            lhs_log: f64::NEG_INFINITY,
            rhs_log,
        });
    }

    let mut remaining: Vec<u64> = multiplicities.to_vec();
    let mut best: Option<(f64, u64, Vec<usize>)> = None;
    let mut round = 1;
    while round <= rounds {
        let alive: Vec<usize> = (0..balls.len()).filter(|&i| remaining[i] > 0).collect();
        if alive.is_empty() {
            return Err(Error::Consistency(format!("family exhausted before round {round}")));
        }
        let sub: Vec<BallSpec> = alive.iter().map(|&i| balls[i].clone()).collect();
        let r = vitali_5r(space, model, &sub)?;
        let chosen: Vec<usize> = r.selected.iter().map(|&j| alive[j]).collect();
        let cost = log_sum_exp(&chosen.iter().map(|&i| log_weights[i]).collect::<Vec<_>>());
        // the selection repeats until a selected multiplicity runs out
        let repeat = chosen.iter().map(|&i| remaining[i]).min().unwrap().min(rounds - round + 1);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, round, chosen.clone()));
        }
        for &i in &chosen {
            remaining[i] -= repeat;
        }
        round += repeat;
    }
    let (lhs_log, chosen_round, mut selected) = best.unwrap();
    selected.sort_unstable();

    verify_disjoint(p, balls, &selected)?;
    let enlarged: Vec<Vec<bool>> = selected
        .iter()
        .map(|&i| enlargement(space, model, &balls[i], 5.0))
        .collect::<Result<_>>()?;
    let mut witness = Vec::with_capacity(z_t.len());
    for &x in &z_t {
        match enlarged.iter().position(|m| m[x]) {
            Some(j) => witness.push(selected[j]),
            None => return Err(Error::Consistency(format!("point {x} of Z_t escapes every 5-fold enlargement"))),
        }
    }
    if lhs_log > rhs_log + 1e-12 * (1.0 + rhs_log.abs()) {
        return Err(Error::Consistency(format!(
            "selected weight e^{lhs_log} exceeds (1/t) sum c_i w_i = e^{rhs_log}"
        )));
    }
    Ok(WeightedSelection {
        selected,
        threshold: t,
        rounds,
        chosen_round,
        z_t,
        witness,
        lhs_log,
        rhs_log,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RealWeightResult {
    pub denominator: u64,
    pub scaled_multiplicities: Vec<u64>,
    pub result: WeightedSelection,
    /// `ln ((1/t) sum_i c_i w_i)` with the unrounded coefficients.
    #[serde(serialize_with = "crate::output::f64")]
    pub real_rhs_log: f64,
}

/// Weighted selection for real coefficients: `c_i` is replaced by `ceil(D c_i)` and `t`
/// by `D t`. The scaled target set contains the original `Z_t`.
pub fn real_weight_disjointify(
    space: &FiniteSpace,
    model: &NdsModel,
    balls: &[BallSpec],
    coefficients: &[f64],
    log_weights: &[f64],
    t: f64,
    denominator: u64,
) -> Result<RealWeightResult> {
    if denominator == 0 {
        return input("denominator must be positive");
    }
    if let Some(c) = coefficients.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
        return input(format!("coefficients must be positive, got {c}"));
    }
    let d = denominator as f64;
    let scaled: Vec<u64> = coefficients.iter().map(|&c| (c * d).ceil() as u64).collect();
    let result = integer_weight_disjointify(space, model, balls, &scaled, log_weights, t * d)?;
    let terms: Vec<(f64, f64)> = coefficients.iter().zip(log_weights).map(|(&c, &w)| (c, w)).collect();
    Ok(RealWeightResult {
        denominator,
        scaled_multiplicities: scaled,
        result,
        real_rhs_log: log_weighted_sum_exp(&terms) - t.ln(),
    })
}
