//! Cover sums `M(n, alpha, eps, Z, psi)`: the minimum of
//! `sum_i e^{-alpha n_i + s_i}` over subfamilies of enumerated balls with
//! `n_i >= n` covering `Z`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::BallFamily;
use crate::logsum::log_sum_exp;
use crate::lp::{solve_fractional, FractionalInstance, FractionalSolution};
use crate::pointset::{PointSet, TargetSet};
use crate::setcover::{exact, greedy, ExactLimits, SetCoverInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Exact,
    Greedy,
    Lp,
    /// Exact, falling back to the greedy upper bound past the solver caps.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    UpperGreedy,
    LowerLp,
}

/// Which cached Birkhoff sum enters the weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Sup of `S_n psi` over the ball.
    Sup,
    /// `S_n psi` at the center.
    Center,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverSolution {
    /// `ln` of the objective.
    #[serde(serialize_with = "crate::output::f64")]
    pub log_objective: f64,
    /// (ball index, coefficient); coefficients are 1 except in LP mode.
    pub picks: Vec<(usize, f64)>,
    pub bound_kind: BoundKind,
    /// LP lower bound, reported when auto mode fell back to greedy.
    #[serde(serialize_with = "crate::output::opt_f64")]
    pub lower_bound: Option<f64>,
}

impl CoverSolution {
    pub fn objective(&self) -> f64 {
        self.log_objective.exp()
    }
}

/// One candidate for a cover: its members, length and Birkhoff value.
#[derive(Clone, Copy, Debug)]
pub struct CoverItem<'a> {
    pub id: usize,
    pub members: &'a PointSet,
    pub length: usize,
    pub sum: f64,
}

/// Candidates restricted to `Z` and grouped by restricted membership, ready
/// to be solved at many exponents.
#[derive(Clone, Debug)]
pub struct PreparedCover {
    z_points: Vec<usize>,
    sets: Vec<Vec<u32>>,
    /// (item id, length, sum) for every item with this restricted set.
    members: Vec<Vec<(usize, usize, f64)>>,
    disjoint: bool,
    pub limits: ExactLimits,
}

impl PreparedCover {
    pub fn from_items<'a>(z: &TargetSet, items: impl IntoIterator<Item = CoverItem<'a>>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Input("target set Z is empty".into()));
        }
        let z_points: Vec<usize> = z.iter().collect();
        let mut local = vec![u32::MAX; z.universe()];
        for (i, &x) in z_points.iter().enumerate() {
            local[x] = i as u32;
        }
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut sets = Vec::new();
        let mut members: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        for item in items {
            if item.sum == f64::NEG_INFINITY {
                continue;
            }
            let restricted: Vec<u32> = item
                .members
                .iter()
                .filter_map(|x| (local[x] != u32::MAX).then_some(local[x]))
                .collect();
            if restricted.is_empty() {
                continue;
            }
            let g = *index.entry(restricted).or_insert_with_key(|k| {
                sets.push(k.clone());
                members.push(Vec::new());
                sets.len() - 1
            });
            members[g].push((item.id, item.length, item.sum));
        }
        let mut hits = vec![0u32; z_points.len()];
        for s in &sets {
            for &x in s {
                hits[x as usize] += 1;
            }
        }
        if let Some(p) = hits.iter().position(|&h| h == 0) {
            return Err(Error::Infeasible { point: z_points[p] });
        }
        let disjoint = hits.iter().all(|&h| h == 1);
        Ok(PreparedCover {
            z_points,
            sets,
            members,
            disjoint,
            limits: ExactLimits::default(),
        })
    }

    /// Balls of `family` with length at least `n_start`.
    pub fn from_family(family: &BallFamily, z: &TargetSet, n_start: usize, variant: Variant) -> Result<Self> {
        if n_start < family.n_min || n_start > family.n_max {
            return Err(Error::Input(format!(
                "cover start length {n_start} outside the family range [{}, {}]",
                family.n_min, family.n_max
            )));
        }
        if z.universe() != family.points {
            return Err(Error::Input(format!(
                "target set has universe {}, family has {} points",
                z.universe(),
                family.points
            )));
        }
        let items = family.indices_from(n_start).map(|i| {
            let b = &family.balls[i];
            CoverItem {
                id: i,
                members: &b.ball.members,
                length: b.length(),
                sum: match variant {
                    Variant::Sup => b.sup_sum,
                    Variant::Center => b.center_sum,
                },
            }
        });
        Self::from_items(z, items)
    }

    pub fn z_points(&self) -> &[usize] {
        &self.z_points
    }

    /// True when the candidate sets partition `Z`; every mode is then exact.
    pub fn is_partition(&self) -> bool {
        self.disjoint
    }

    /// Cheapest member weight per group and the item achieving it.
    fn weights(&self, alpha: f64) -> (Vec<f64>, Vec<usize>) {
        self.members
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&(id, n, s)| (-alpha * n as f64 + s, id))
                    .fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a })
            })
            .unzip()
    }

    fn instance(&self, alpha: f64) -> (SetCoverInstance, Vec<usize>) {
        let (log_weights, argmin) = self.weights(alpha);
        (
            SetCoverInstance {
                n_points: self.z_points.len(),
                sets: self.sets.clone(),
                log_weights,
            },
            argmin,
        )
    }

    pub fn solve(&self, alpha: f64, mode: CoverMode) -> Result<CoverSolution> {
        let kind = match mode {
            CoverMode::Exact | CoverMode::Auto => BoundKind::Exact,
            CoverMode::Greedy => BoundKind::UpperGreedy,
            CoverMode::Lp => BoundKind::LowerLp,
        };
        if self.disjoint {
            let (w, argmin) = self.weights(alpha);
            return Ok(CoverSolution {
                log_objective: log_sum_exp(&w),
                picks: argmin.into_iter().map(|i| (i, 1.0)).collect(),
                bound_kind: kind,
                lower_bound: None,
            });
        }
        let (inst, argmin) = self.instance(alpha);
        let integral = |sol: crate::setcover::SetCoverSolution, kind, lower_bound| CoverSolution {
            log_objective: sol.log_value,
            picks: sol.chosen.iter().map(|&g| (argmin[g], 1.0)).collect(),
            bound_kind: kind,
            lower_bound,
        };
        match mode {
            CoverMode::Exact => Ok(integral(exact(&inst, &self.limits)?, kind, None)),
            CoverMode::Greedy => Ok(integral(greedy(&inst)?, kind, None)),
            CoverMode::Lp => {
                let (sol, argmin) = self.fractional(alpha, None)?;
                Ok(CoverSolution {
                    log_objective: sol.log_value,
                    picks: sol
                        .coefficients
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0.0)
                        .map(|(g, &c)| (argmin[g], c))
                        .collect(),
                    bound_kind: kind,
                    lower_bound: None,
                })
            }
            CoverMode::Auto => match exact(&inst, &self.limits) {
                Ok(sol) => Ok(integral(sol, kind, None)),
                Err(Error::Resource(msg)) => {
                    log::debug!("exact cover unavailable ({msg}); reporting greedy/lp bracket");
                    let lower = self.fractional(alpha, None).ok().map(|(s, _)| s.log_value);
                    Ok(integral(greedy(&inst)?, BoundKind::UpperGreedy, lower))
                }
                Err(e) => Err(e),
            },
        }
    }

    /// Fractional cover with demand `demand` (indexed like [`Self::z_points`];
    /// all ones when `None`). Set indices of the result are group indices;
    /// the second vector maps them to item ids.
    pub fn fractional(&self, alpha: f64, demand: Option<&[f64]>) -> Result<(FractionalSolution, Vec<usize>)> {
        let (log_weights, argmin) = self.weights(alpha);
        let demand = match demand {
            Some(d) => d.to_vec(),
            None => vec![1.0; self.z_points.len()],
        };
        let inst = FractionalInstance {
            n_points: self.z_points.len(),
            sets: self.sets.clone(),
            log_weights,
            demand,
        };
        let sol = match solve_fractional(&inst) {
            Err(Error::Infeasible { point }) => return Err(Error::Infeasible { point: self.z_points[point] }),
            other => other?,
        };
        Ok((sol, argmin))
    }
}

/// `M(n_min, alpha, eps, Z, psi)` over the whole family.
pub fn cover_value(family: &BallFamily, z: &TargetSet, alpha: f64, mode: CoverMode) -> Result<CoverSolution> {
    PreparedCover::from_family(family, z, family.n_min, Variant::Sup)?.solve(alpha, mode)
}

/// Relative slack allowed in monotonicity assertions.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// `(n, ln M(n, alpha))` for `n = n_min..=n_max`; non-decreasing in `n`
/// unless the greedy bound is in use.
pub fn limit_in_n(family: &BallFamily, z: &TargetSet, alpha: f64, variant: Variant, mode: CoverMode) -> Result<Vec<(usize, f64)>> {
    let mut out: Vec<(usize, f64, BoundKind)> = Vec::new();
    for n in family.n_min..=family.n_max {
        let sol = PreparedCover::from_family(family, z, n, variant)?.solve(alpha, mode)?;
        out.push((n, sol.log_objective, sol.bound_kind));
    }
    for w in out.windows(2) {
        let certified = w[0].2 != BoundKind::UpperGreedy && w[1].2 != BoundKind::UpperGreedy;
        if certified && w[1].1 < w[0].1 - MONOTONE_SLACK * (1.0 + w[0].1.abs()) {
            return Err(Error::Consistency(format!(
                "cover value decreased from n={} (ln {}) to n={} (ln {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(out.into_iter().map(|(n, v, _)| (n, v)).collect())
}
