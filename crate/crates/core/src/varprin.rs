//! End-to-end comparison of the cover pressure, the weighted pressure and
//! the measure pressures of a finite family of candidate measures, all at
//! the same `(eps, n_min, n_max)`.
//!
//! The supremum over all measures with `mu(Z) = 1` is replaced by the best
//! candidate, so the measure column is only a lower bound for it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{CoverMode, Variant};
use crate::error::{input, Result};
use crate::family::enumerate_family;
use crate::frostman::frostman_from_family;
use crate::measure::{bernoulli_measure, measure_pressure, pointwise_estimates, ProbMeasure};
use crate::pointset::TargetSet;
use crate::pressure::{critical_alpha, critical_alpha_family, BisectionConfig};
use crate::space::{FiniteSpace, NdsModel, Potential};
use crate::weighted::weighted_critical_alpha_family;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub eps: f64,
    pub n_min: usize,
    pub n_max: usize,
}

#[derive(Clone, Debug)]
pub enum CandidateKind {
    Fixed(ProbMeasure),
    /// Dual measure of the weighted cover LP at `P^W_est - offset`.
    Frostman { offset: f64 },
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub id: String,
    pub kind: CandidateKind,
}

/// Bernoulli grid `p in {0.1, ..., 0.9}` on symbol 0 (the other symbols share
/// `1 - p`) conditioned on `Z`, the uniform measure on `Z`, and the Frostman
/// measure just below the weighted pressure. Bernoulli candidates with
/// `mu(Z) = 0` are left out.
pub fn auto_candidates(space: &FiniteSpace, z: &TargetSet) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    if let Some((k, _)) = space.symbolic_shape() {
        for i in 1..=9 {
            let p = i as f64 / 10.0;
            let mut w = vec![(1.0 - p) / (k - 1) as f64; k];
            w[0] = p;
            let mu = bernoulli_measure(space, &w)?;
            if let Ok(c) = mu.conditioned(z) {
                out.push(Candidate {
                    id: format!("bernoulli:{p:.1}"),
                    kind: CandidateKind::Fixed(c),
                });
            }
        }
    }
    out.push(Candidate {
        id: "uniform-on-z".into(),
        kind: CandidateKind::Fixed(ProbMeasure::uniform_on(z)?),
    });
    out.push(Candidate {
        id: "frostman".into(),
        kind: CandidateKind::Frostman { offset: 1e-3 },
    });
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateResult {
    pub id: String,
    /// Tail-minimum measure pressure at the row's scale.
    pub pressure: Option<f64>,
    /// Same with the symbolic finite-size correction.
    pub corrected: Option<f64>,
    /// Why the candidate produced no value.
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalRow {
    pub eps: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub p_b: f64,
    pub p_w: f64,
    pub candidates: Vec<CandidateResult>,
    #[serde(serialize_with = "crate::output::f64")]
    pub best_measure_pressure: f64,
    pub best_measure_id: String,
    pub best_corrected: Option<f64>,
    /// `p_b - p_w`.
    pub weighted_margin: f64,
    /// `p_b - best_measure_pressure`.
    #[serde(serialize_with = "crate::output::f64")]
    pub gap: f64,
    pub weighted_ok: bool,
    pub sandwich_ok: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub system_id: String,
    pub z_id: String,
    pub psi_id: String,
    /// `psi = 0`: the columns are entropies.
    pub entropy_mode: bool,
    pub tolerance: f64,
    pub slack: f64,
    pub tail_fraction: f64,
    pub rows: Vec<VariationalRow>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VariationalOptions {
    pub bisection: BisectionConfig,
    pub tail_fraction: f64,
    pub slack: f64,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        VariationalOptions {
            bisection: BisectionConfig::default(),
            tail_fraction: 0.5,
            slack: 0.05,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Labels {
    pub system_id: String,
    pub z_id: String,
    pub psi_id: String,
}

#[allow(clippy::too_many_arguments)]
fn run_row(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    z: &TargetSet,
    scale: Scale,
    candidates: &[Candidate],
    opts: &VariationalOptions,
) -> Result<VariationalRow> {
    let family = enumerate_family(space, model, psi, scale.eps, scale.n_max, scale.n_max)?;
    let pb = critical_alpha_family(&family, psi, z, Variant::Sup, CoverMode::Auto, &opts.bisection)?;
    let pw = weighted_critical_alpha_family(&family, psi, z, &opts.bisection)?;
    let range = (scale.n_min, scale.n_max);
    let results: Vec<CandidateResult> = candidates
        .par_iter()
        .map(|c| {
            let mu = match &c.kind {
                CandidateKind::Fixed(mu) => Ok(mu.clone()),
                CandidateKind::Frostman { offset } => {
                    frostman_from_family(&family, z, pw.alpha_star - offset, scale.n_max).map(|f| f.measure)
                }
            };
            let value = mu.and_then(|mu| measure_pressure(space, model, &mu, psi, &[scale.eps], range, opts.tail_fraction));
            match value {
                Ok(r) => CandidateResult {
                    id: c.id.clone(),
                    pressure: Some(r.headline),
                    corrected: r.headline_corrected,
                    note: None,
                },
                Err(e) => CandidateResult {
                    id: c.id.clone(),
                    pressure: None,
                    corrected: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    let best = results
        .iter()
        .filter_map(|r| r.pressure.map(|p| (p, r)))
        .fold(None::<(f64, &CandidateResult)>, |acc, (p, r)| match acc {
            Some((q, _)) if q >= p => acc,
            _ => Some((p, r)),
        });
    let found = best.is_some();
    let (best_p, best_id, best_corrected) = match best {
        Some((p, r)) => (p, r.id.clone(), r.corrected),
        None => (f64::NEG_INFINITY, String::new(), None),
    };
    let tol = opts.bisection.tol;
    let weighted_ok = pw.alpha_star <= pb.alpha_star + 2.0 * tol;
    let sandwich_ok = best_p <= pb.alpha_star + opts.slack;
    Ok(VariationalRow {
        eps: scale.eps,
        n_min: scale.n_min,
        n_max: scale.n_max,
        p_b: pb.alpha_star,
        p_w: pw.alpha_star,
        candidates: results,
        best_measure_pressure: best_p,
        best_measure_id: best_id,
        best_corrected,
        weighted_margin: pb.alpha_star - pw.alpha_star,
        gap: pb.alpha_star - best_p,
        weighted_ok,
        sandwich_ok,
        pass: weighted_ok && sandwich_ok && found,
    })
}

/// Cover, weighted and best-candidate measure pressure at every scale.
#[allow(clippy::too_many_arguments)]
pub fn run_variational_check(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    z: &TargetSet,
    scales: &[Scale],
    candidates: &[Candidate],
    labels: &Labels,
    opts: &VariationalOptions,
) -> Result<VariationalReport> {
    if z.is_empty() {
        return input("Z is empty");
    }
    if candidates.is_empty() {
        return input("no candidate measures");
    }
    if scales.is_empty() {
        return input("no scales");
    }
    for c in candidates {
        if let CandidateKind::Fixed(mu) = &c.kind {
            if mu.len() != space.len() {
                return input(format!("candidate {} has {} masses, space has {}", c.id, mu.len(), space.len()));
            }
            if let Some(x) = mu.support().into_iter().find(|&x| !z.contains(x)) {
                return input(format!("candidate {} charges point {x} outside Z", c.id));
            }
        }
    }
    let rows = scales
        .par_iter()
        .map(|&s| run_row(space, model, psi, z, s, candidates, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VariationalReport {
        system_id: labels.system_id.clone(),
        z_id: labels.z_id.clone(),
        psi_id: labels.psi_id.clone(),
        entropy_mode: psi.values().iter().all(|&v| v == 0.0),
        tolerance: opts.bisection.tol,
        slack: opts.slack,
        tail_fraction: opts.tail_fraction,
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// The same check with the zero potential.
#[allow(clippy::too_many_arguments)]
pub fn run_entropy_check(
    space: &FiniteSpace,
    model: &NdsModel,
    z: &TargetSet,
    scales: &[Scale],
    candidates: &[Candidate],
    labels: &Labels,
    opts: &VariationalOptions,
) -> Result<VariationalReport> {
    run_variational_check(space, model, &Potential::zero(space.len()), z, scales, candidates, labels, opts)
}

impl VariationalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,n_min,n_max,pB,pW,best_mu_pressure,best_mu_id,gap,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.9},{:.9},{:.9},{},{:.9},{}\n",
                r.eps, r.n_min, r.n_max, r.p_b, r.p_w, r.best_measure_pressure, r.best_measure_id, r.gap, r.pass
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub eps: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub p_b: f64,
    /// Largest local estimate over `Z`; absent when `Z` leaves the support
    /// of `mu` (the upper bound is then vacuous).
    #[serde(serialize_with = "crate::output::opt_f64")]
    pub s_max: Option<f64>,
    /// Smallest local estimate over `Z` within the support of `mu`.
    pub s_min: f64,
    #[serde(serialize_with = "crate::output::opt_f64")]
    pub upper_margin: Option<f64>,
    pub lower_margin: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub pass: bool,
}

/// Compares `P^B_est(Z)` with the extreme local estimates of `mu` on `Z`.
#[allow(clippy::too_many_arguments)]
pub fn measure_sandwich(
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    z: &TargetSet,
    mu: &ProbMeasure,
    scale: Scale,
    opts: &VariationalOptions,
) -> Result<SandwichReport> {
    if !(mu.measure_of(z) > 0.0) {
        return input("mu(Z) must be positive");
    }
    let pts: Vec<usize> = z.iter().filter(|&x| mu.mass(x) > 0.0).collect();
    let est = pointwise_estimates(space, model, mu, psi, &pts, scale.eps, (scale.n_min, scale.n_max), opts.tail_fraction)?;
    let vals: Vec<f64> = est.iter().map(|e| e.0).collect();
    let s_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = (pts.len() == z.count()).then(|| vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let pb = critical_alpha(space, model, psi, scale.eps, z, scale.n_min, scale.n_max, Variant::Sup, CoverMode::Auto, &opts.bisection)?;
    let upper_margin = s_max.map(|s| s + opts.slack - pb.alpha_star);
    let lower_margin = pb.alpha_star - (s_min - opts.slack);
    let upper_ok = upper_margin.is_none_or(|m| m >= 0.0);
    let lower_ok = lower_margin >= 0.0;
    Ok(SandwichReport {
        eps: scale.eps,
        n_min: scale.n_min,
        n_max: scale.n_max,
        p_b: pb.alpha_star,
        s_max,
        s_min,
        upper_margin,
        lower_margin,
        upper_ok,
        lower_ok,
        pass: upper_ok && lower_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_circle_multiplication, build_symbolic_shift};

    fn labels() -> Labels {
        Labels {
            system_id: "s".into(),
            z_id: "z".into(),
            psi_id: "p".into(),
        }
    }

    #[test]
    fn fixed_point_everything_vanishes() {
        let sys = build_circle_multiplication(&[2, 3], 36).unwrap();
        let z = TargetSet::from_indices(36, [0]);
        let cands = auto_candidates(&sys.space, &z).unwrap();
        let scale = Scale { eps: 0.05, n_min: 2, n_max: 6 };
        let rep = run_entropy_check(&sys.space, &sys.model, &z, &[scale], &cands, &labels(), &VariationalOptions::default()).unwrap();
        let r = &rep.rows[0];
        assert!(rep.entropy_mode && rep.pass);
        assert!(r.p_b.abs() < 1e-5 && r.p_w.abs() < 1e-5);
        assert!(r.best_measure_pressure.abs() < 1e-12);
    }

    #[test]
    fn full_shift_sandwich() {
        let sys = build_symbolic_shift(2, 12).unwrap();
        let z = TargetSet::full(sys.len());
        let cands = auto_candidates(&sys.space, &z).unwrap();
        assert_eq!(cands.len(), 11);
        let scale = Scale { eps: 0.25, n_min: 4, n_max: 10 };
        let rep = run_entropy_check(&sys.space, &sys.model, &z, &[scale], &cands, &labels(), &VariationalOptions::default()).unwrap();
        let r = &rep.rows[0];
        assert!(rep.pass, "{r:?}");
        assert!(r.gap.abs() < 0.02);
        assert!((r.p_b - 1.2 * 2f64.ln()).abs() < 1e-5);
        assert!(rep.to_csv().lines().nth(1).unwrap().ends_with("true"));

        let mu = ProbMeasure::uniform(sys.len()).unwrap();
        let a = measure_sandwich(&sys.space, &sys.model, &Potential::zero(sys.len()), &z, &mu, scale, &VariationalOptions::default()).unwrap();
        assert!(a.pass);
        let shifted = measure_sandwich(&sys.space, &sys.model, &Potential::constant(sys.len(), 0.3), &z, &mu, scale, &VariationalOptions::default()).unwrap();
        assert!((shifted.lower_margin - a.lower_margin).abs() < 2e-6);
    }

    #[test]
    fn candidates_must_live_on_z() {
        let sys = build_symbolic_shift(2, 6).unwrap();
        let z = TargetSet::from_indices(64, [0, 1]);
        let cands = vec![Candidate {
            id: "u".into(),
            kind: CandidateKind::Fixed(ProbMeasure::uniform(64).unwrap()),
        }];
        let scale = Scale { eps: 0.25, n_min: 1, n_max: 3 };
        let r = run_entropy_check(&sys.space, &sys.model, &z, &[scale], &cands, &labels(), &VariationalOptions::default());
        assert!(r.is_err());
    }
}
