//! Weighted (fractional) cover sums `W(n, alpha, eps, g, psi)`: the minimum
//! of `sum_i c_i e^{-alpha n_i + s_i}` over `c >= 0` with
//! `sum_i c_i chi_{B_i} >= g`, and the associated critical exponent.

use serde::Serialize;

use crate::cover::{BoundKind, CoverMode, PreparedCover, Variant};
use crate::error::{Error, Result};
use crate::family::{enumerate_family, BallFamily};
use crate::pointset::TargetSet;
use crate::pressure::{bisect, BisectionConfig, Method, PressureEstimate};
use crate::space::{FiniteSpace, NdsModel, Potential};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionalCoverSolution {
    #[serde(serialize_with = "crate::output::f64")]
    pub log_objective: f64,
    #[serde(serialize_with = "crate::output::f64")]
    pub log_dual_objective: f64,
    /// (ball index, c_i) for every positive coefficient.
    pub coefficients: Vec<(usize, f64)>,
    /// `ln y_x` per point of the space; negative infinity off the support
    /// of the demand or where the price vanishes.
    #[serde(serialize_with = "crate::output::vec_f64")]
    pub log_prices: Vec<f64>,
    /// `(primal - dual) / primal`.
    pub duality_gap: f64,
    pub status: LpStatus,
}

impl FractionalCoverSolution {
    pub fn objective(&self) -> f64 {
        self.log_objective.exp()
    }
}

/// `W(n_start, alpha, eps, g, psi)` over the balls of `family` with length
/// at least `n_start`. `demand` has one entry per point of the space.
pub fn fractional_cover_value(family: &BallFamily, demand: &[f64], alpha: f64, n_start: usize) -> Result<FractionalCoverSolution> {
    if demand.len() != family.points {
        return Err(Error::Input(format!(
            "demand has {} entries, space has {} points",
            demand.len(),
            family.points
        )));
    }
    if let Some(x) = demand.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Input(format!(
            "demand must be finite and nonnegative; point {x} has {}",
            demand[x]
        )));
    }
    let z = TargetSet::from_indices(family.points, (0..family.points).filter(|&x| demand[x] > 0.0));
    if z.is_empty() {
        return Err(Error::Input("demand has empty support".into()));
    }
    let prep = PreparedCover::from_family(family, &z, n_start, Variant::Sup)?;
    let local: Vec<f64> = prep.z_points().iter().map(|&x| demand[x]).collect();
    let (sol, argmin) = prep.fractional(alpha, Some(&local))?;
    let mut log_prices = vec![f64::NEG_INFINITY; family.points];
    for (i, &x) in prep.z_points().iter().enumerate() {
        log_prices[x] = sol.log_prices[i];
    }
    let mut coefficients: Vec<(usize, f64)> = sol
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(g, &c)| (argmin[g], c))
        .collect();
    coefficients.sort_by_key(|&(i, _)| i);
    Ok(FractionalCoverSolution {
        log_objective: sol.log_value,
        log_dual_objective: sol.log_dual_value,
        duality_gap: sol.relative_gap(),
        coefficients,
        log_prices,
        status: LpStatus::Optimal,
    })
}

/// `W` with demand `chi_Z`.
pub fn weighted_cover_value(family: &BallFamily, z: &TargetSet, alpha: f64, n_start: usize) -> Result<FractionalCoverSolution> {
    let demand: Vec<f64> = (0..family.points).map(|x| if z.contains(x) { 1.0 } else { 0.0 }).collect();
    fractional_cover_value(family, &demand, alpha, n_start)
}

pub fn weighted_critical_alpha_family(family: &BallFamily, psi: &Potential, z: &TargetSet, cfg: &BisectionConfig) -> Result<PressureEstimate> {
    let prep = PreparedCover::from_family(family, z, family.n_max, Variant::Sup)?;
    let (lo, hi) = cfg.bracket(psi, family.points);
    let b = bisect(lo, hi, cfg, |a| Ok((prep.fractional(a, None)?.0.log_value, BoundKind::LowerLp)))?;
    Ok(PressureEstimate {
        alpha_star: b.alpha,
        eps: Some(family.eps),
        n_min: family.n_min,
        n_max: family.n_max,
        bracket: b.bracket,
        threshold: cfg.theta,
        method: Method::Weighted,
        bound_kind: b.bound_kind,
        iterations: b.iterations,
        objective_curve: b.curve,
    })
}

/// Empirical `P^W(eps, Z, psi)`; covers use balls of length `n_max`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_critical_alpha(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    z: &TargetSet,
    n_min: usize,
    n_max: usize,
    cfg: &BisectionConfig,
) -> Result<PressureEstimate> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::Input(format!("need 1 <= n_min <= n_max, got n_min={n_min}, n_max={n_max}")));
    }
    let family = enumerate_family(space, model, psi, eps, n_max, n_max)?;
    let mut est = weighted_critical_alpha_family(&family, psi, z, cfg)?;
    est.n_min = n_min;
    Ok(est)
}

/// Smallest `N >= 2` with `n^2 e^{-n delta} <= 1` for every `n >= N`.
pub fn minimal_admissible_n(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Input(format!("delta must be positive, got {delta}")));
    }
    let ok = |n: usize| 2.0 * (n as f64).ln() - n as f64 * delta <= 0.0;
    // n^2 e^{-n delta} increases up to 2/delta and decreases after it
    let peak = 2.0 / delta;
    let (lo, hi) = (peak.floor().max(1.0) as usize, peak.ceil().max(1.0) as usize);
    if ok(lo) && ok(hi) {
        return Ok(2);
    }
    let mut n = hi;
    while !ok(n) {
        n += 1;
    }
    Ok(n.max(2))
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityRow {
    pub alpha: f64,
    /// `ln scriptM(N, alpha + delta, 6 eps)`.
    #[serde(serialize_with = "crate::output::f64")]
    pub lhs_log: f64,
    /// `ln W(N, alpha, eps)`.
    #[serde(serialize_with = "crate::output::f64")]
    pub rhs_log: f64,
    /// `rhs_log - lhs_log`.
    #[serde(serialize_with = "crate::output::f64")]
    pub margin: f64,
    pub lhs_kind: BoundKind,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub eps: f64,
    pub delta: f64,
    pub big_n: usize,
    pub n_max: usize,
    pub min_admissible_n: usize,
    pub rows: Vec<InequalityRow>,
    pub violations: usize,
    pub pass: bool,
}

/// Relative slack for comparing two independently solved objectives.
const PROP42_SLACK: f64 = 1e-9;

/// Checks `scriptM(N, alpha + delta, 6 eps, Z, psi) <= W(N, alpha, eps, Z, psi)`
/// at each `alpha`, with both sides over lengths `[N, n_max]`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_inequality_check(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    z: &TargetSet,
    big_n: Option<usize>,
    n_max: usize,
    delta: f64,
    alphas: &[f64],
    mode: CoverMode,
) -> Result<InequalityReport> {
    let min_n = minimal_admissible_n(delta)?;
    let big_n = big_n.unwrap_or(min_n);
    if big_n < min_n {
        return Err(Error::Input(format!(
            "N = {big_n} violates n^2 e^(-n delta) <= 1 for all n >= N; minimal admissible N is {min_n}"
        )));
    }
    if n_max < big_n {
        return Err(Error::Input(format!("n_max = {n_max} is below N = {big_n}")));
    }
    if mode == CoverMode::Lp {
        return Err(Error::Input("the left-hand side needs an integral cover mode".into()));
    }
    let wide = enumerate_family(space, model, psi, 6.0 * eps, big_n, n_max)?;
    let narrow = enumerate_family(space, model, psi, eps, big_n, n_max)?;
    let lhs = PreparedCover::from_family(&wide, z, big_n, Variant::Center)?;
    let rhs = PreparedCover::from_family(&narrow, z, big_n, Variant::Sup)?;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let l = lhs.solve(alpha + delta, mode)?;
        let r = rhs.fractional(alpha, None)?.0;
        let margin = r.log_value - l.log_objective;
        rows.push(InequalityRow {
            alpha,
            lhs_log: l.log_objective,
            rhs_log: r.log_value,
            margin,
            lhs_kind: l.bound_kind,
            pass: margin >= -PROP42_SLACK * (1.0 + r.log_value.abs()),
        });
    }
    let violations = rows.iter().filter(|r| !r.pass).count();
    Ok(InequalityReport {
        eps,
        delta,
        big_n,
        n_max,
        min_admissible_n: min_n,
        rows,
        violations,
        pass: violations == 0,
    })
}
