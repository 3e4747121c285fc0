//! Finite metric spaces, non-autonomous maps, Bowen metrics, dynamical balls
//! and Birkhoff sums.
//!
//! Every space is a finite point set `0..P`. Three kinds are built in:
//!
//! * the full `k`-shift truncated to words of length `L`, with
//!   `d(x, y) = 2^-min{j : x_j != y_j}` and the left shift padded by symbol 0;
//! * the grid `{j/N}` on the circle with time-dependent multiplications
//!   `f_n(x) = a_n x mod 1`;
//! * an explicit distance matrix with a cyclic list of map tables.
//!
//! Words are indexed with coordinate 0 as the most significant base-`k`
//! digit, so every cylinder is a contiguous index range. That is what makes
//! the symbolic fast path for dynamical balls cheap.
//!
//! Time indices are 1-based: `f_1` is the first map. `f_i^0` is the identity
//! and `f_i^{n+1} = f_{i+n} o f_i^n`.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::pointset::{PointSet, TargetSet};

/// Largest number of points a builder will materialize unless told otherwise.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

/// Distance matrices are validated exhaustively for the triangle inequality
/// up to this many points and on a deterministic sample above.
const FULL_TRIANGLE_CHECK: usize = 160;

#[derive(Clone, Debug)]
enum Metric {
    Symbolic { k: usize, len: usize, block: Vec<usize> },
    Circle { n: usize },
    Table { dist: Vec<f64> },
}

/// A finite metric space on the points `0..P`.
#[derive(Clone, Debug)]
pub struct FiniteSpace {
    points: usize,
    metric: Metric,
    diameter: f64,
}

impl FiniteSpace {
    /// Symbolic words of length `len` over `k` symbols.
    pub fn symbolic(k: usize, len: usize, budget: usize) -> Result<Self> {
        if k < 2 || len < 2 {
            return input(format!("symbolic shift needs k >= 2 and L >= 2, got k={k}, L={len}"));
        }
        let points = (k as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
        if points > budget as u128 {
            return Err(Error::Resource(format!(
                "k^L = {k}^{len} points exceeds the point budget {budget}"
            )));
        }
        // block[j] = k^(L-1-j): weight of coordinate j in the word index
        let block = (0..len).map(|j| k.pow((len - 1 - j) as u32)).collect();
        Ok(FiniteSpace {
            points: points as usize,
            metric: Metric::Symbolic { k, len, block },
            diameter: 1.0,
        })
    }

    /// The grid `{0, 1/N, ..., (N-1)/N}` with the circle metric.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 1 {
            return input("circle grid needs N >= 1");
        }
        Ok(FiniteSpace {
            points: n,
            metric: Metric::Circle { n },
            diameter: (n / 2) as f64 / n as f64,
        })
    }

    /// An explicit symmetric distance matrix given row by row.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return input("distance matrix must have at least one point");
        }
        let mut dist = Vec::with_capacity(p * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return input(format!("distance matrix row {i} has {} entries, expected {p}", row.len()));
            }
            dist.extend_from_slice(row);
        }
        let at = |i: usize, j: usize| dist[i * p + j];
        let mut diameter: f64 = 0.0;
        for i in 0..p {
            if at(i, i) != 0.0 {
                return input(format!("d({i},{i}) = {} must be 0", at(i, i)));
            }
            for j in 0..p {
                let d = at(i, j);
                if !d.is_finite() || d < 0.0 {
                    return input(format!("d({i},{j}) = {d} must be finite and nonnegative"));
                }
                if (d - at(j, i)).abs() > 1e-12 * (1.0 + d.abs()) {
                    return input(format!("distance matrix is not symmetric at ({i},{j})"));
                }
                diameter = diameter.max(d);
            }
        }
        let triangle = |a: usize, b: usize, c: usize| at(a, b) <= at(a, c) + at(c, b) + 1e-12;
        if p <= FULL_TRIANGLE_CHECK {
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        if !triangle(a, b, c) {
                            return input(format!("triangle inequality fails for ({a},{b},{c})"));
                        }
                    }
                }
            }
        } else {
            // Deterministic LCG sample of triples.
            let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
            for _ in 0..1_000_000 {
                let mut next = || {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) as usize) % p
                };
                let (a, b, c) = (next(), next(), next());
                if !triangle(a, b, c) {
                    return input(format!("triangle inequality fails for ({a},{b},{c})"));
                }
            }
        }
        Ok(FiniteSpace {
            points: p,
            metric: Metric::Table { dist },
            diameter,
        })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `(k, L)` when this is a symbolic word space.
    pub fn symbolic_shape(&self) -> Option<(usize, usize)> {
        match &self.metric {
            Metric::Symbolic { k, len, .. } => Some((*k, *len)),
            _ => None,
        }
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.points {
            Ok(())
        } else {
            input(format!("point index {x} out of range 0..{}", self.points))
        }
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Symbolic { k, len, block } => {
                if x == y {
                    return 0.0;
                }
                let j = first_difference(*k, *len, block, x, y);
                (0.5f64).powi(j as i32)
            }
            Metric::Circle { n } => {
                let dd = x.abs_diff(y) % n;
                dd.min(n - dd) as f64 / *n as f64
            }
            Metric::Table { dist } => dist[x * self.points + y],
        }
    }

    /// Symbol at coordinate `j` of word `x` (symbolic spaces only).
    pub fn symbol(&self, x: usize, j: usize) -> Option<usize> {
        match &self.metric {
            Metric::Symbolic { k, len, block } if j < *len => Some((x / block[j]) % k),
            _ => None,
        }
    }

    /// Word index of a symbol sequence (symbolic spaces only).
    pub fn word_index(&self, word: &[usize]) -> Option<usize> {
        match &self.metric {
            Metric::Symbolic { k, len, block } if word.len() == *len && word.iter().all(|&s| s < *k) => {
                Some(word.iter().zip(block).map(|(s, b)| s * b).sum())
            }
            _ => None,
        }
    }

    /// True when some pair of points sits at distance exactly `eps`, which
    /// makes the strict ball inequality sensitive to rounding.
    pub fn attains_distance(&self, eps: f64) -> bool {
        match &self.metric {
            Metric::Symbolic { len, .. } => (0..*len).any(|j| (0.5f64).powi(j as i32) == eps),
            Metric::Circle { n } => {
                let t = eps * *n as f64;
                (t - t.round()).abs() < 1e-9 && t.round() >= 0.0 && t.round() <= (*n / 2) as f64
            }
            Metric::Table { dist } => dist.iter().any(|&d| (d - eps).abs() <= 1e-12 * (1.0 + eps)),
        }
    }
}

fn first_difference(k: usize, len: usize, block: &[usize], x: usize, y: usize) -> usize {
    if k == 2 {
        let diff = (x ^ y) as u64;
        return (diff.leading_zeros() as usize) - (64 - len);
    }
    (0..len)
        .find(|&j| (x / block[j]) % k != (y / block[j]) % k)
        .unwrap_or(len)
}

/// Which family a model belongs to, plus what the fast paths need.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    SymbolicShift { k: usize, len: usize },
    CircleMultiplication { multipliers: Vec<u64>, n: usize },
    ExplicitTable { maps: Vec<Vec<u32>> },
}

/// The sequence of maps `f_1, f_2, ...` acting on point indices.
#[derive(Clone, Debug)]
pub struct NdsModel {
    points: usize,
    kind: ModelKind,
}

impl NdsModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::SymbolicShift { .. } => "symbolic-shift",
            ModelKind::CircleMultiplication { .. } => "circle-mult",
            ModelKind::ExplicitTable { .. } => "explicit-table",
        }
    }

    /// `(k, L)` for the padded shift.
    pub fn symbolic(&self) -> Option<(usize, usize)> {
        match self.kind {
            ModelKind::SymbolicShift { k, len } => Some((k, len)),
            _ => None,
        }
    }

    /// `f_time(x)` for `time >= 1`.
    #[inline]
    pub fn apply(&self, time: usize, x: usize) -> usize {
        debug_assert!(time >= 1);
        match &self.kind {
            ModelKind::SymbolicShift { k, .. } => (x * k) % self.points,
            ModelKind::CircleMultiplication { multipliers, n } => {
                let a = multipliers[(time - 1) % multipliers.len()];
                ((a as u128 * x as u128) % *n as u128) as usize
            }
            ModelKind::ExplicitTable { maps } => maps[(time - 1) % maps.len()][x] as usize,
        }
    }

    /// `f_i^j(x)`.
    pub fn iterate(&self, i: usize, j: usize, x: usize) -> usize {
        (0..j).fold(x, |y, step| self.apply(i + step, y))
    }

    /// The full table of `f_time`.
    pub fn map_at(&self, time: usize) -> Vec<u32> {
        (0..self.points).map(|x| self.apply(time, x) as u32).collect()
    }
}

/// A space together with its maps.
#[derive(Clone, Debug)]
pub struct System {
    pub space: FiniteSpace,
    pub model: NdsModel,
}

impl System {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }
}

/// Full `k`-shift on words of length `L` with the padded left shift.
pub fn build_symbolic_shift(k: usize, len: usize) -> Result<System> {
    build_symbolic_shift_with_budget(k, len, DEFAULT_POINT_BUDGET)
}

pub fn build_symbolic_shift_with_budget(k: usize, len: usize, budget: usize) -> Result<System> {
    let space = FiniteSpace::symbolic(k, len, budget)?;
    let model = NdsModel {
        points: space.len(),
        kind: ModelKind::SymbolicShift { k, len },
    };
    Ok(System { space, model })
}

/// Circle grid of size `N` with `f_n(x) = a_n x mod 1`, where the
/// multipliers repeat with period `multipliers.len()`.
pub fn build_circle_multiplication(multipliers: &[u64], n: usize) -> Result<System> {
    if multipliers.is_empty() {
        return input("circle multiplication needs at least one multiplier");
    }
    if let Some(&a) = multipliers.iter().find(|&&a| a == 0 || !(n as u64).is_multiple_of(a)) {
        return input(format!("grid size N={n} is not divisible by multiplier {a}"));
    }
    let space = FiniteSpace::circle(n)?;
    let model = NdsModel {
        points: n,
        kind: ModelKind::CircleMultiplication {
            multipliers: multipliers.to_vec(),
            n,
        },
    };
    Ok(System { space, model })
}

/// Explicit distance matrix plus a cyclic list of map tables.
pub fn build_explicit_table(dist: &[Vec<f64>], maps: Vec<Vec<u32>>) -> Result<System> {
    let space = FiniteSpace::from_matrix(dist)?;
    if maps.is_empty() {
        return input("explicit table needs at least one map");
    }
    for (t, m) in maps.iter().enumerate() {
        if m.len() != space.len() {
            return input(format!("map {t} has {} entries, expected {}", m.len(), space.len()));
        }
        if let Some(&bad) = m.iter().find(|&&y| y as usize >= space.len()) {
            return input(format!("map {t} sends a point to {bad}, outside the space"));
        }
    }
    let model = NdsModel {
        points: space.len(),
        kind: ModelKind::ExplicitTable { maps },
    };
    Ok(System { space, model })
}

/// Product subset `{w : w_j in A_j}` of a symbolic space.
pub fn build_product_subset(space: &FiniteSpace, allowed: &[Vec<usize>]) -> Result<TargetSet> {
    let Some((k, len)) = space.symbolic_shape() else {
        return input("product subsets need a symbolic-shift space");
    };
    if allowed.len() != len {
        return input(format!("{} coordinate constraints given, word length is {len}", allowed.len()));
    }
    let mut sets = Vec::with_capacity(len);
    for (j, a) in allowed.iter().enumerate() {
        let mut a = a.clone();
        a.sort_unstable();
        a.dedup();
        if a.is_empty() {
            return input(format!("allowed symbol set A_{j} is empty"));
        }
        if let Some(&s) = a.iter().find(|&&s| s >= k) {
            return input(format!("symbol {s} in A_{j} is outside the alphabet 0..{k}"));
        }
        sets.push(a);
    }
    let mut z = TargetSet::empty(space.len());
    let mut idx = vec![0usize; len];
    loop {
        let word: Vec<usize> = idx.iter().zip(&sets).map(|(&i, a)| a[i]).collect();
        z.insert(space.word_index(&word).expect("valid word"));
        // odometer increment, last coordinate fastest
        let mut j = len;
        loop {
            if j == 0 {
                return Ok(z);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < sets[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// A continuous potential: one real value per point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    values: Vec<f64>,
}

impl Potential {
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return input(format!("potential value at point {i} is not finite"));
        }
        Ok(Potential { values })
    }

    pub fn constant(points: usize, c: f64) -> Self {
        Potential {
            values: vec![c; points],
        }
    }

    pub fn zero(points: usize) -> Self {
        Self::constant(points, 0.0)
    }

    /// `psi(x) = phi(x_0)` on a symbolic space.
    pub fn first_symbol(space: &FiniteSpace, phi: &[f64]) -> Result<Self> {
        let Some((k, _)) = space.symbolic_shape() else {
            return input("first-symbol potentials need a symbolic-shift space");
        };
        if phi.len() != k {
            return input(format!("phi has {} entries, alphabet has {k}", phi.len()));
        }
        Self::table((0..space.len()).map(|x| phi[space.symbol(x, 0).unwrap()]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn at(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `psi + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Potential {
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// A dynamical ball `B(x, i, n, eps)` with its exact membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: usize,
    pub start: usize,
    pub length: usize,
    pub radius: f64,
    pub members: PointSet,
}

fn check_times(i: usize, n: usize) -> Result<()> {
    if i < 1 || n < 1 {
        return input(format!("initial time and length must be >= 1, got i={i}, n={n}"));
    }
    Ok(())
}

/// `d_{i,n}(x, y) = max_{0<=j<n} d(f_i^j x, f_i^j y)`.
pub fn bowen_distance(model: &NdsModel, space: &FiniteSpace, i: usize, n: usize, x: usize, y: usize) -> Result<f64> {
    check_times(i, n)?;
    space.check_point(x)?;
    space.check_point(y)?;
    Ok(bowen_distance_unchecked(model, space, i, n, x, y))
}

fn bowen_distance_unchecked(model: &NdsModel, space: &FiniteSpace, i: usize, n: usize, x: usize, y: usize) -> f64 {
    let (mut a, mut b) = (x, y);
    let mut d: f64 = 0.0;
    for j in 0..n {
        d = d.max(space.dist(a, b));
        if j + 1 < n {
            a = model.apply(i + j, a);
            b = model.apply(i + j, b);
        }
    }
    d
}

/// Number of leading coordinates pinned by `B_n(x, eps)` in the padded
/// `k`-shift on words of length `L`. The ball is the cylinder of that depth.
pub fn symbolic_ball_depth(len: usize, eps: f64, n: usize) -> usize {
    // y is eps-close to x iff they agree on the first `c1` coordinates
    let c1 = (0..len).find(|&j| (0.5f64).powi(j as i32) < eps).unwrap_or(len);
    if c1 == 0 {
        0
    } else {
        (c1 + n - 1).min(len)
    }
}

/// Extra coordinates pinned by an `eps`-ball beyond the orbit length: the
/// `m` of `eps = 2^-m` on symbolic spaces. `None` for other spaces.
pub fn symbolic_scale_offset(model: &NdsModel, eps: f64) -> Option<usize> {
    let (_, len) = model.symbolic()?;
    Some(symbolic_ball_depth(len, eps, 1).saturating_sub(1))
}

fn cylinder(k: usize, len: usize, x: usize, depth: usize) -> PointSet {
    let block = k.pow((len - depth) as u32);
    let start = (x / block) * block;
    PointSet::range(start, start + block)
}

/// Nested memberships of `B(x, i, n, eps)` for `n = 1..=n_max`.
pub fn ball_chain(model: &NdsModel, space: &FiniteSpace, x: usize, i: usize, eps: f64, n_max: usize) -> Vec<PointSet> {
    if let Some((k, len)) = model.symbolic() {
        return (1..=n_max)
            .map(|n| cylinder(k, len, x, symbolic_ball_depth(len, eps, n)))
            .collect();
    }
    let mut chain = Vec::with_capacity(n_max);
    // (original point, current orbit position) for surviving candidates
    let mut cand: Vec<(u32, u32)> = (0..space.len())
        .filter(|&y| space.dist(x, y) < eps)
        .map(|y| (y as u32, y as u32))
        .collect();
    let mut cx = x;
    for n in 1..=n_max {
        if n > 1 {
            let t = i + n - 2;
            cx = model.apply(t, cx);
            for c in cand.iter_mut() {
                c.1 = model.apply(t, c.1 as usize) as u32;
            }
            cand.retain(|&(_, p)| space.dist(cx, p as usize) < eps);
        }
        chain.push(PointSet::from_sorted(cand.iter().map(|c| c.0).collect()));
    }
    chain
}

/// `B(x, i, n, eps) = {y : d_{i,n}(x, y) < eps}`.
pub fn dynamical_ball(model: &NdsModel, space: &FiniteSpace, x: usize, i: usize, n: usize, eps: f64) -> Result<BallSpec> {
    check_times(i, n)?;
    space.check_point(x)?;
    if !(eps > 0.0) {
        return input(format!("ball radius must be positive, got {eps}"));
    }
    let members = if let Some((k, len)) = model.symbolic() {
        cylinder(k, len, x, symbolic_ball_depth(len, eps, n))
    } else {
        ball_chain(model, space, x, i, eps, n).pop().unwrap()
    };
    Ok(BallSpec {
        center: x,
        start: i,
        length: n,
        radius: eps,
        members,
    })
}

/// Reference ball: scans every point with [`bowen_distance`].
pub fn dynamical_ball_bruteforce(model: &NdsModel, space: &FiniteSpace, x: usize, i: usize, n: usize, eps: f64) -> Result<BallSpec> {
    check_times(i, n)?;
    space.check_point(x)?;
    let members = (0..space.len())
        .filter(|&y| bowen_distance_unchecked(model, space, i, n, x, y) < eps)
        .map(|y| y as u32)
        .collect();
    Ok(BallSpec {
        center: x,
        start: i,
        length: n,
        radius: eps,
        members: PointSet::from_sorted(members),
    })
}

/// `S_{i,n} psi(x) = sum_{j<n} psi(f_i^j x)`.
pub fn birkhoff_sum(model: &NdsModel, psi: &Potential, i: usize, n: usize, x: usize) -> f64 {
    let mut y = x;
    let mut s = 0.0;
    for j in 0..n {
        s += psi.at(y);
        if j + 1 < n {
            y = model.apply(i + j, y);
        }
    }
    s
}

/// `sup_{x in U} S_{i,n} psi(x)`; negative infinity for empty `U`.
pub fn birkhoff_sup(model: &NdsModel, psi: &Potential, i: usize, n: usize, set: impl IntoIterator<Item = usize>) -> f64 {
    set.into_iter()
        .map(|x| birkhoff_sum(model, psi, i, n, x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Birkhoff sums `S_{i,n} psi` at every point for `n = 1..=n_max`, built
/// incrementally along the orbits. Entry `n-1` holds the length-`n` sums.
pub fn birkhoff_table(model: &NdsModel, psi: &Potential, i: usize, n_max: usize) -> Vec<Vec<f64>> {
    let p = model.points();
    let mut pos: Vec<usize> = (0..p).collect();
    let mut acc = vec![0.0; p];
    let mut out = Vec::with_capacity(n_max);
    for j in 0..n_max {
        for (a, &y) in acc.iter_mut().zip(&pos) {
            *a += psi.at(y);
        }
        out.push(acc.clone());
        if j + 1 < n_max {
            for y in pos.iter_mut() {
                *y = model.apply(i + j, *y);
            }
        }
    }
    out
}

/// `lambda(eps) = sup{|psi(x) - psi(y)| : d(x, y) < 2 eps}`.
pub fn modulus_of_continuity(space: &FiniteSpace, psi: &Potential, eps: f64) -> f64 {
    let r = 2.0 * eps;
    if let Some((k, len)) = space.symbolic_shape() {
        // pairs closer than r are exactly the pairs inside one cylinder
        let depth = symbolic_ball_depth(len, r, 1);
        let block = k.pow((len - depth) as u32);
        return psi
            .values()
            .chunks(block)
            .map(|c| {
                let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
                hi - lo
            })
            .fold(0.0, f64::max);
    }
    let p = space.len();
    let mut best: f64 = 0.0;
    for x in 0..p {
        for y in (x + 1)..p {
            if space.dist(x, y) < r {
                best = best.max((psi.at(x) - psi.at(y)).abs());
            }
        }
    }
    best
}
