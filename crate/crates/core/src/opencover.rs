//! String formulation over a fixed finite cover `U` of the space: a string
//! `(U_1, ..., U_m)` picks out the cylinder
//! `X(U) = U_1 ∩ f_1^{-1} U_2 ∩ ... ∩ f_1^{-(m-1)} U_m`, weighted by
//! `e^{-alpha m + sup_{X(U)} S_{1,m} psi}`.
//!
//! Strings with an empty cylinder carry weight `e^{-inf} = 0`; they can never
//! help a cover, are not extended, and are not stored.

use serde::Serialize;

use crate::cover::{CoverItem, CoverMode, PreparedCover};
use crate::error::{Error, Result};
use crate::pointset::{PointSet, TargetSet};
use crate::pressure::{critical_alpha_prepared, BisectionConfig, Method, PressureEstimate};
use crate::space::{birkhoff_table, FiniteSpace, NdsModel, Potential};

/// Default cap on the number of stored strings.
pub const DEFAULT_STRING_CAP: usize = 1 << 20;

#[derive(Clone, Debug, Serialize)]
pub struct CoverString {
    /// Indices into the cover.
    pub word: Vec<u32>,
    pub cylinder: PointSet,
    /// `sup_{X(U)} S_{1,m} psi`.
    pub sup_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StringCover {
    pub cover: Vec<PointSet>,
    pub big_n: usize,
    pub n_max: usize,
    /// Nonempty strings with `big_n <= m(U) <= n_max`.
    pub strings: Vec<CoverString>,
}

/// Enumerates every string with a nonempty cylinder.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_strings(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    cover: &[PointSet],
    big_n: usize,
    n_max: usize,
    cap: usize,
) -> Result<StringCover> {
    let p = space.len();
    if big_n < 1 || n_max < big_n {
        return Err(Error::Input(format!("need 1 <= N <= n_max, got N={big_n}, n_max={n_max}")));
    }
    if cover.is_empty() {
        return Err(Error::Input("open cover is empty".into()));
    }
    let mut seen = vec![false; p];
    for u in cover {
        for x in u.iter() {
            if x >= p {
                return Err(Error::Input(format!("cover element mentions point {x}, space has {p}")));
            }
            seen[x] = true;
        }
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        return Err(Error::Input(format!("the sets do not cover the space: point {x} is missing")));
    }
    let members: Vec<Vec<bool>> = cover
        .iter()
        .map(|u| {
            let mut m = vec![false; p];
            for x in u.iter() {
                m[x] = true;
            }
            m
        })
        .collect();
    // orbit[j][x] = f_1^j x
    let mut orbit = vec![(0..p as u32).collect::<Vec<u32>>()];
    for j in 1..n_max {
        let prev = &orbit[j - 1];
        orbit.push(prev.iter().map(|&y| model.apply(j, y as usize) as u32).collect());
    }
    let sums = birkhoff_table(model, psi, 1, n_max);

    let mut strings = Vec::new();
    let mut stack: Vec<(Vec<u32>, Vec<u32>)> = cover
        .iter()
        .enumerate()
        .rev()
        .map(|(i, u)| (vec![i as u32], u.to_vec()))
        .collect();
    while let Some((word, cyl)) = stack.pop() {
        let m = word.len();
        if m >= big_n {
            if strings.len() == cap {
                return Err(Error::Resource(format!("more than {cap} nonempty strings (cap)")));
            }
            let sup = cyl.iter().map(|&x| sums[m - 1][x as usize]).fold(f64::NEG_INFINITY, f64::max);
            strings.push(CoverString {
                word: word.clone(),
                cylinder: PointSet::from_sorted(cyl.clone()),
                sup_sum: sup,
            });
        }
        if m < n_max {
            for i in (0..cover.len()).rev() {
                let next: Vec<u32> = cyl.iter().copied().filter(|&x| members[i][orbit[m][x as usize] as usize]).collect();
                if !next.is_empty() {
                    let mut w = word.clone();
                    w.push(i as u32);
                    stack.push((w, next));
                }
            }
        }
    }
    Ok(StringCover {
        cover: cover.to_vec(),
        big_n,
        n_max,
        strings,
    })
}

impl StringCover {
    pub fn prepare(&self, z: &TargetSet) -> Result<PreparedCover> {
        PreparedCover::from_items(
            z,
            self.strings.iter().enumerate().map(|(id, s)| CoverItem {
                id,
                members: &s.cylinder,
                length: s.word.len(),
                sum: s.sup_sum,
            }),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OpenCoverReport {
    pub strings: usize,
    /// `(alpha, ln M^alpha(U, N, Z, psi))` when an exponent was requested.
    pub objective: Option<(f64, f64)>,
    pub estimate: PressureEstimate,
}

/// `M^alpha(U, N, Z, psi)` at `alpha` (optional) and the exponent where it
/// crosses the threshold.
#[allow(clippy::too_many_arguments)]
pub fn open_cover_pressure(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    cover: &[PointSet],
    z: &TargetSet,
    big_n: usize,
    n_max: usize,
    alpha: Option<f64>,
    mode: CoverMode,
    cfg: &BisectionConfig,
) -> Result<OpenCoverReport> {
    let sc = enumerate_strings(space, model, psi, cover, big_n, n_max, DEFAULT_STRING_CAP)?;
    let prep = sc.prepare(z)?;
    let objective = match alpha {
        Some(a) => Some((a, prep.solve(a, mode)?.log_objective)),
        None => None,
    };
    let b = critical_alpha_prepared(&prep, mode, cfg.bracket(psi, space.len()), cfg)?;
    Ok(OpenCoverReport {
        strings: sc.strings.len(),
        objective,
        estimate: PressureEstimate {
            alpha_star: b.alpha,
            eps: None,
            n_min: big_n,
            n_max,
            bracket: b.bracket,
            threshold: cfg.theta,
            method: Method::OpenCover,
            bound_kind: b.bound_kind,
            iterations: b.iterations,
            objective_curve: b.curve,
        },
    })
}
