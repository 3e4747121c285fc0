//! Empirical critical exponents: the `alpha` at which a cover objective
//! crosses the threshold `theta`, located by bisection.

use serde::{Deserialize, Serialize};

use crate::cover::{BoundKind, CoverMode, PreparedCover, Variant, MONOTONE_SLACK};
use crate::error::{Error, Result};
use crate::family::{enumerate_family, BallFamily};
use crate::pointset::TargetSet;
use crate::space::{modulus_of_continuity, FiniteSpace, NdsModel, Potential};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    /// Final bracket width.
    pub tol: f64,
    pub max_iter: usize,
    pub theta: f64,
    /// Added on both sides of `[-|psi| - ln P, |psi| + ln P]`.
    pub pad: f64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            tol: 1e-6,
            max_iter: 80,
            theta: 1.0,
            pad: 1.0,
        }
    }
}

impl BisectionConfig {
    pub fn bracket(&self, psi: &Potential, points: usize) -> (f64, f64) {
        let r = psi.sup_norm() + (points as f64).ln() + self.pad;
        (-r, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SupVariant,
    CenterVariant,
    OpenCover,
    Weighted,
}

impl From<Variant> for Method {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Sup => Method::SupVariant,
            Variant::Center => Method::CenterVariant,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureEstimate {
    pub alpha_star: f64,
    /// Ball radius; absent for the open-cover formulation.
    pub eps: Option<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub bracket: (f64, f64),
    pub threshold: f64,
    pub method: Method,
    /// Weakest guarantee among the objective evaluations.
    pub bound_kind: BoundKind,
    pub iterations: usize,
    /// `(alpha, ln objective)` for every evaluation, sorted by `alpha`.
    #[serde(serialize_with = "crate::output::pairs")]
    pub objective_curve: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Bisection {
    pub alpha: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub bound_kind: BoundKind,
    pub curve: Vec<(f64, f64)>,
}

/// Finds where the non-increasing `ln objective(alpha)` crosses `ln theta`
/// inside `[lo, hi]`. Monotonicity is asserted on every evaluation except
/// greedy ones.
pub fn bisect(lo: f64, hi: f64, cfg: &BisectionConfig, mut eval: impl FnMut(f64) -> Result<(f64, BoundKind)>) -> Result<Bisection> {
    if !(cfg.theta > 0.0) {
        return Err(Error::Input(format!("threshold must be positive, got {}", cfg.theta)));
    }
    let log_theta = cfg.theta.ln();
    let mut curve: Vec<(f64, f64, BoundKind)> = Vec::new();
    let mut record = |a: f64, curve: &mut Vec<(f64, f64, BoundKind)>| -> Result<f64> {
        let (v, kind) = eval(a)?;
        if kind != BoundKind::UpperGreedy {
            for &(b, w, k) in curve.iter() {
                if k == BoundKind::UpperGreedy {
                    continue;
                }
                let (lo_v, hi_v) = if b < a { (w, v) } else { (v, w) };
                if b != a && hi_v > lo_v + MONOTONE_SLACK * (1.0 + lo_v.abs()) {
                    return Err(Error::Consistency(format!(
                        "objective increased in alpha between {} and {}",
                        a.min(b),
                        a.max(b)
                    )));
                }
            }
        }
        curve.push((a, v, kind));
        Ok(v)
    };
    let f_lo = record(lo, &mut curve)?;
    let f_hi = record(hi, &mut curve)?;
    if !(f_lo >= log_theta && f_hi <= log_theta) {
        return Err(Error::NoBracket {
            lo,
            hi,
            f_lo: f_lo.exp(),
            f_hi: f_hi.exp(),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > cfg.tol && iterations < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if record(mid, &mut curve)? > log_theta {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let bound_kind = if curve.iter().any(|c| c.2 == BoundKind::UpperGreedy) {
        BoundKind::UpperGreedy
    } else {
        curve[0].2
    };
    let mut curve: Vec<(f64, f64)> = curve.into_iter().map(|(a, v, _)| (a, v)).collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Bisection {
        alpha: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
        bound_kind,
        curve,
    })
}

/// Critical exponent of covers drawn from `family` with lengths `>= n_start`.
pub fn critical_alpha_prepared(
    prep: &PreparedCover,
    mode: CoverMode,
    bracket: (f64, f64),
    cfg: &BisectionConfig,
) -> Result<Bisection> {
    bisect(bracket.0, bracket.1, cfg, |a| {
        let s = prep.solve(a, mode)?;
        Ok((s.log_objective, s.bound_kind))
    })
}

/// Critical exponent of covers by balls of `family` of its largest length.
pub fn critical_alpha_family(
    family: &BallFamily,
    psi: &Potential,
    z: &TargetSet,
    variant: Variant,
    mode: CoverMode,
    cfg: &BisectionConfig,
) -> Result<PressureEstimate> {
    let prep = PreparedCover::from_family(family, z, family.n_max, variant)?;
    let b = critical_alpha_prepared(&prep, mode, cfg.bracket(psi, family.points), cfg)?;
    Ok(PressureEstimate {
        alpha_star: b.alpha,
        eps: Some(family.eps),
        n_min: family.n_min,
        n_max: family.n_max,
        bracket: b.bracket,
        threshold: cfg.theta,
        method: variant.into(),
        bound_kind: b.bound_kind,
        iterations: b.iterations,
        objective_curve: b.curve,
    })
}

/// Empirical `P(eps, Z, psi)` (sup variant) or its center-value analogue.
/// Covers use balls of length `n_max`; `n_min` is validated and reported.
#[allow(clippy::too_many_arguments)]
pub fn critical_alpha(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    z: &TargetSet,
    n_min: usize,
    n_max: usize,
    variant: Variant,
    mode: CoverMode,
    cfg: &BisectionConfig,
) -> Result<PressureEstimate> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::Input(format!("need 1 <= n_min <= n_max, got n_min={n_min}, n_max={n_max}")));
    }
    let family = enumerate_family(space, model, psi, eps, n_max, n_max)?;
    let mut est = critical_alpha_family(&family, psi, z, variant, mode, cfg)?;
    est.n_min = n_min;
    Ok(est)
}

/// Symbolic finite-size correction of an entropy estimate: balls of length
/// `n` at `eps = 2^-m` are `(n + m)`-cylinders, so the critical exponent
/// carries a factor `(n + m) / n`. Only meaningful with `psi = 0`.
pub fn entropy_scale_correction(alpha: f64, n: usize, m: usize) -> f64 {
    alpha * n as f64 / (n + m) as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizonRow {
    pub n_max: usize,
    pub lambda: f64,
    pub p_sup: f64,
    pub p_center: f64,
    /// `p_center - (p_sup - lambda)`, nonnegative when the lower side holds.
    pub lower_margin: f64,
    /// `p_sup - p_center`, nonnegative when the upper side holds.
    pub upper_margin: f64,
    /// Smallest `ln scriptM(alpha) - ln M(alpha + lambda)` over the probe grid.
    pub objective_margin: f64,
    pub bound_kind: BoundKind,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizonReport {
    pub eps: f64,
    pub rows: Vec<HorizonRow>,
    pub pass: bool,
}

/// Compares the center-value and sup variants at each horizon: the center
/// objective at `alpha` dominates the sup objective at `alpha + lambda`, and
/// the critical values satisfy `P - lambda <= scriptP <= P` up to `2 tol`.
#[allow(clippy::too_many_arguments)]
pub fn horizon_check(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    z: &TargetSet,
    horizons: &[usize],
    mode: CoverMode,
    cfg: &BisectionConfig,
) -> Result<HorizonReport> {
    let lambda = modulus_of_continuity(space, psi, eps);
    let mut rows = Vec::new();
    for &n in horizons {
        let family = enumerate_family(space, model, psi, eps, n, n)?;
        let sup = critical_alpha_family(&family, psi, z, Variant::Sup, mode, cfg)?;
        let center = critical_alpha_family(&family, psi, z, Variant::Center, mode, cfg)?;
        let prep_sup = PreparedCover::from_family(&family, z, n, Variant::Sup)?;
        let prep_center = PreparedCover::from_family(&family, z, n, Variant::Center)?;
        let mut objective_margin = f64::INFINITY;
        let mut kind = if sup.bound_kind == BoundKind::UpperGreedy || center.bound_kind == BoundKind::UpperGreedy {
            BoundKind::UpperGreedy
        } else {
            sup.bound_kind
        };
        for a in [sup.alpha_star - 1.0, center.alpha_star, sup.alpha_star, sup.alpha_star + 1.0] {
            let c = prep_center.solve(a, mode)?;
            let s = prep_sup.solve(a + lambda, mode)?;
            if c.bound_kind == BoundKind::UpperGreedy || s.bound_kind == BoundKind::UpperGreedy {
                kind = BoundKind::UpperGreedy;
            }
            objective_margin = objective_margin.min(c.log_objective - s.log_objective);
        }
        let lower_margin = center.alpha_star - (sup.alpha_star - lambda);
        let upper_margin = sup.alpha_star - center.alpha_star;
        let pass = lower_margin >= -2.0 * cfg.tol && upper_margin >= -2.0 * cfg.tol && objective_margin >= -1e-9;
        rows.push(HorizonRow {
            n_max: n,
            lambda,
            p_sup: sup.alpha_star,
            p_center: center.alpha_star,
            lower_margin,
            upper_margin,
            objective_margin,
            bound_kind: kind,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(HorizonReport { eps, rows, pass })
}
