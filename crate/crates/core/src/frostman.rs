//! Frostman-type measures read off the dual of the fractional cover LP.
//!
//! With `c = W(N, alpha, eps, chi_Z, psi) > 0` the optimal prices `y` satisfy
//! `y(B) <= e^{-alpha n + sup_B S_n psi}` for every ball of length at least
//! `N`, so `nu = y / sum y` is a probability measure on `Z` with
//! `nu(B) <= w(B) / c`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{enumerate_family, BallFamily};
use crate::logsum::log_sum_exp;
use crate::lp::DUALITY_TOLERANCE;
use crate::measure::{ball_measure, ProbMeasure};
use crate::pointset::TargetSet;
use crate::space::{FiniteSpace, NdsModel, Potential};
use crate::weighted::weighted_cover_value;

/// `W` at or below this value is treated as zero.
pub const DEGENERATE_VALUE: f64 = 1e-12;

/// Relative slack allowed in `nu(B) <= w(B) / c`.
pub const FROSTMAN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct FrostmanMeasure {
    pub alpha: f64,
    pub eps: f64,
    pub big_n: usize,
    pub n_max: usize,
    /// `ln W` (primal optimum).
    pub log_weighted_value: f64,
    /// `ln c` with `c = sum_x y_x`, the constant in the ball bound.
    pub log_c: f64,
    pub duality_gap: f64,
    /// `sum_i c_i (w_i - y(B_i)) / primal`.
    pub ball_slackness: f64,
    /// `sum_x y_x (sum_i c_i chi_{B_i}(x) - 1) / primal`.
    pub point_slackness: f64,
    pub measure: ProbMeasure,
}

fn weight(family: &BallFamily, i: usize, alpha: f64) -> f64 {
    let b = &family.balls[i];
    -alpha * b.length() as f64 + b.sup_sum
}

/// Builds `nu` from an enumerated family (balls with length in
/// `[big_n, family.n_max]`).
pub fn frostman_from_family(family: &BallFamily, z: &TargetSet, alpha: f64, big_n: usize) -> Result<FrostmanMeasure> {
    if big_n < family.n_min || big_n > family.n_max {
        return Err(Error::Input(format!(
            "N={big_n} is outside the enumerated lengths [{}, {}]",
            family.n_min, family.n_max
        )));
    }
    let sol = weighted_cover_value(family, z, alpha, big_n)?;
    if sol.log_objective <= DEGENERATE_VALUE.ln() {
        return Err(Error::Degenerate(format!(
            "W = {:e} at alpha = {alpha}; no Frostman measure",
            sol.log_objective.exp()
        )));
    }
    if sol.duality_gap > DUALITY_TOLERANCE {
        return Err(Error::Solver(format!("duality gap {:e} above tolerance", sol.duality_gap)));
    }
    let log_c = log_sum_exp(&sol.log_prices);
    let mass: Vec<f64> = sol.log_prices.iter().map(|&l| (l - log_c).exp()).collect();
    let measure = ProbMeasure::new(mass)?;

    let y: Vec<f64> = sol.log_prices.iter().map(|&l| (l - sol.log_objective).exp()).collect();
    let mut cover = vec![0.0; family.points];
    let mut ball_slack = 0.0;
    for &(i, c) in &sol.coefficients {
        let members = &family.balls[i].ball.members;
        let yb: f64 = members.iter().map(|x| y[x]).sum();
        ball_slack += c * ((weight(family, i, alpha) - sol.log_objective).exp() - yb);
        for x in members.iter() {
            cover[x] += c;
        }
    }
    let point_slack: f64 = z.iter().map(|x| y[x] * (cover[x] - 1.0)).sum();
    if ball_slack.abs() > DUALITY_TOLERANCE || point_slack.abs() > DUALITY_TOLERANCE {
        return Err(Error::Solver(format!(
            "complementary slackness residuals {ball_slack:e} / {point_slack:e}"
        )));
    }
    Ok(FrostmanMeasure {
        alpha,
        eps: family.eps,
        big_n,
        n_max: family.n_max,
        log_weighted_value: sol.log_objective,
        log_c,
        duality_gap: sol.duality_gap,
        ball_slackness: ball_slack,
        point_slackness: point_slack,
        measure,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn frostman_measure(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    z: &TargetSet,
    alpha: f64,
    big_n: usize,
    n_max: usize,
) -> Result<FrostmanMeasure> {
    let family = enumerate_family(space, model, psi, eps, big_n, n_max)?;
    frostman_from_family(&family, z, alpha, big_n)
}

#[derive(Clone, Debug, Serialize)]
pub struct FrostmanCheck {
    pub balls_checked: usize,
    /// Largest `nu(B) - w(B) / c`.
    #[serde(serialize_with = "crate::output::f64")]
    pub max_excess: f64,
    /// Largest `nu(B) c / w(B)`.
    pub max_ratio: f64,
    pub worst_ball: Option<usize>,
    /// Balls breaking the bound.
    pub violations: Vec<usize>,
    /// Mass of `nu` outside `Z`.
    pub mass_off_z: f64,
    pub pass: bool,
}

/// Checks `nu(B) <= w(B) / c` for every ball of length at least `N`.
pub fn verify_frostman(family: &BallFamily, z: &TargetSet, nu: &FrostmanMeasure) -> FrostmanCheck {
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_ratio = 0.0f64;
    let mut worst = None;
    let mut checked = 0;
    let mut violations = Vec::new();
    for i in family.indices_from(nu.big_n) {
        checked += 1;
        let m = ball_measure(&nu.measure, &family.balls[i].ball.members);
        let bound = (weight(family, i, nu.alpha) - nu.log_c).exp();
        let ratio = if m > 0.0 { m / bound } else { 0.0 };
        if m - bound > max_excess {
            max_excess = m - bound;
        }
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = Some(i);
        }
        if m > bound * (1.0 + FROSTMAN_SLACK) {
            violations.push(i);
        }
    }
    let mass_off_z = (0..family.points).filter(|&x| !z.contains(x)).map(|x| nu.measure.mass(x)).sum();
    FrostmanCheck {
        balls_checked: checked,
        max_excess,
        max_ratio,
        worst_ball: worst,
        pass: violations.is_empty() && mass_off_z == 0.0,
        violations,
        mass_off_z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_circle_multiplication, build_symbolic_shift};

    #[test]
    fn full_shift_cylinders_are_tight() {
        let sys = build_symbolic_shift(2, 8).unwrap();
        let psi = Potential::zero(256);
        let z = TargetSet::full(256);
        let fam = enumerate_family(&sys.space, &sys.model, &psi, 0.25, 3, 5).unwrap();
        let nu = frostman_from_family(&fam, &z, 0.5, 3).unwrap();
        let check = verify_frostman(&fam, &z, &nu);
        assert!(check.pass, "{check:?}");
        assert!(check.max_ratio <= 1.0 + 1e-9);
        // optimal covers use the 32 five-cylinders, each tight
        for c in 0..32 {
            let m: f64 = (c * 8..c * 8 + 8).map(|x| nu.measure.mass(x)).sum();
            assert!((m - 1.0 / 32.0).abs() < 1e-9);
        }
    }

    #[test]
    fn supported_on_target() {
        let sys = build_circle_multiplication(&[2, 3], 48).unwrap();
        let psi = Potential::table((0..48).map(|x| ((x * 7) % 5) as f64 * 0.2 - 0.4).collect()).unwrap();
        let z = TargetSet::from_indices(48, [1, 5, 6, 20, 33, 34, 47]);
        let fam = enumerate_family(&sys.space, &sys.model, &psi, 0.05, 2, 4).unwrap();
        let nu = frostman_from_family(&fam, &z, 0.3, 2).unwrap();
        let check = verify_frostman(&fam, &z, &nu);
        assert!(check.pass, "{check:?}");
        assert_eq!(check.mass_off_z, 0.0);
        assert!(nu.log_c <= nu.log_weighted_value + 1e-9);
    }

    #[test]
    fn perturbation_is_caught() {
        let sys = build_symbolic_shift(2, 6).unwrap();
        let psi = Potential::zero(64);
        let z = TargetSet::full(64);
        let fam = enumerate_family(&sys.space, &sys.model, &psi, 0.25, 2, 2).unwrap();
        let mut nu = frostman_from_family(&fam, &z, 0.0, 2).unwrap();
        assert!(verify_frostman(&fam, &z, &nu).max_excess.abs() < 1e-15);
        let mut mass = nu.measure.masses().to_vec();
        mass[0] += 0.01;
        mass[63] -= 0.01;
        nu.measure = ProbMeasure::new(mass).unwrap();
        let check = verify_frostman(&fam, &z, &nu);
        assert!(!check.pass);
        assert!(check.violations.iter().all(|&i| fam.balls[i].ball.members.contains(0)));
    }

    #[test]
    fn huge_alpha_is_degenerate() {
        let sys = build_symbolic_shift(2, 6).unwrap();
        let psi = Potential::zero(64);
        let fam = enumerate_family(&sys.space, &sys.model, &psi, 0.25, 2, 3).unwrap();
        let r = frostman_from_family(&fam, &TargetSet::full(64), 40.0, 2);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }
}
