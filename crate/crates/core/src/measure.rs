//! Probability measures on the finite space, ball masses, and the local
//! exponents `(-ln mu(B_n(x, eps)) + S_{1,n} psi(x)) / n`.
//!
//! The liminf over `n` is replaced by the minimum over the tail of the
//! computed range. On symbolic spaces with `eps = 2^-m` the ball is an
//! `(n+m)`-cylinder, so each value is also reported with `-ln mu(B)`
//! multiplied by `n / (n + m)`, which removes the finite-size factor
//! `(n + m) / n` from the measure term and leaves the Birkhoff sum alone.
//!
//! Finite spaces make every point function measurable, so no measurability
//! step is needed before integrating.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::family::check_symbolic_regime;
use crate::pointset::{PointSet, TargetSet};
use crate::space::{ball_chain, symbolic_ball_depth, symbolic_scale_offset, FiniteSpace, NdsModel, Potential};

/// Accepted deviation of the total mass from 1 before renormalization.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbMeasure {
    mass: Vec<f64>,
}

impl ProbMeasure {
    /// Validates nonnegative masses summing to 1 (within
    /// [`MASS_TOLERANCE`]) and renormalizes exactly.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if let Some(x) = mass.iter().position(|&m| !(m >= 0.0 && m.is_finite())) {
            return input(format!("mass at point {x} is {}", mass[x]));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return input(format!("masses sum to {total}, expected 1"));
        }
        Ok(ProbMeasure {
            mass: mass.into_iter().map(|m| m / total).collect(),
        })
    }

    pub fn uniform(points: usize) -> Result<Self> {
        if points == 0 {
            return input("uniform measure on an empty space");
        }
        Ok(ProbMeasure {
            mass: vec![1.0 / points as f64; points],
        })
    }

    pub fn uniform_on(z: &TargetSet) -> Result<Self> {
        let c = z.count();
        if c == 0 {
            return input("uniform measure on an empty set");
        }
        let mut mass = vec![0.0; z.universe()];
        for x in z.iter() {
            mass[x] = 1.0 / c as f64;
        }
        Ok(ProbMeasure { mass })
    }

    pub fn point_mass(points: usize, x: usize) -> Result<Self> {
        if x >= points {
            return input(format!("point {x} outside a space of {points} points"));
        }
        let mut mass = vec![0.0; points];
        mass[x] = 1.0;
        Ok(ProbMeasure { mass })
    }

    /// `mu(. | Z)`.
    pub fn conditioned(&self, z: &TargetSet) -> Result<Self> {
        let total: f64 = z.iter().map(|x| self.mass[x]).sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("conditioning on a set of zero measure".into()));
        }
        let mass = (0..self.mass.len())
            .map(|x| if z.contains(x) { self.mass[x] / total } else { 0.0 })
            .collect();
        Ok(ProbMeasure { mass })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, x: usize) -> f64 {
        self.mass[x]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.mass.len()).filter(|&x| self.mass[x] > 0.0).collect()
    }

    /// `mu(Z)`.
    pub fn measure_of(&self, z: &TargetSet) -> f64 {
        z.iter().map(|x| self.mass[x]).sum()
    }
}

/// Product measure on the words of a symbolic space.
pub fn bernoulli_measure(space: &FiniteSpace, weights: &[f64]) -> Result<ProbMeasure> {
    let Some((k, len)) = space.symbolic_shape() else {
        return input("Bernoulli measures need a symbolic space");
    };
    if weights.len() != k {
        return input(format!("{} symbol weights for a {k}-symbol alphabet", weights.len()));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return input("symbol weights must be nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return input(format!("symbol weights sum to {total}, expected 1"));
    }
    let mut mass = vec![1.0];
    for _ in 0..len {
        mass = mass.iter().flat_map(|&m| weights.iter().map(move |&w| m * w)).collect();
    }
    Ok(ProbMeasure { mass })
}

/// `mu(B)`, summed over the members in index order.
pub fn ball_measure(mu: &ProbMeasure, members: &PointSet) -> f64 {
    match members {
        PointSet::Range { start, end } => mu.mass[*start as usize..*end as usize].iter().sum(),
        PointSet::List(v) => v.iter().map(|&x| mu.mass[x as usize]).sum(),
    }
}

/// Profile terms `[point][n - n_lo] = (-ln mu(B_n(x, eps)), S_{1,n} psi(x))`.
#[allow(clippy::too_many_arguments)]
fn profile_values(
    space: &FiniteSpace,
    model: &NdsModel,
    mu: &ProbMeasure,
    psi: &Potential,
    points: &[usize],
    eps: f64,
    n_lo: usize,
    n_hi: usize,
) -> Result<Vec<Vec<(f64, f64)>>> {
    if n_lo < 1 || n_hi < n_lo {
        return input(format!("need 1 <= n_lo <= n_hi, got {n_lo}..{n_hi}"));
    }
    if !(eps > 0.0) {
        return input(format!("ball radius must be positive, got {eps}"));
    }
    if mu.len() != space.len() || psi.len() != space.len() {
        return input("measure, potential and space sizes differ");
    }
    check_symbolic_regime(model, eps, n_hi)?;
    let width = n_hi - n_lo + 1;
    let mut out = vec![Vec::with_capacity(width); points.len()];
    if let Some((k, len)) = model.symbolic() {
        let mut pos: Vec<usize> = points.to_vec();
        let mut acc = vec![0.0; points.len()];
        for n in 1..=n_hi {
            for (a, &y) in acc.iter_mut().zip(&pos) {
                *a += psi.at(y);
            }
            if n >= n_lo {
                let block = k.pow((len - symbolic_ball_depth(len, eps, n)) as u32);
                let chunks: Vec<f64> = mu.mass.chunks(block).map(|c| c.iter().sum()).collect();
                for (i, &x) in points.iter().enumerate() {
                    let m = chunks[x / block];
                    if !(m > 0.0) {
                        return Err(Error::DegenerateMeasure { point: x, n });
                    }
                    out[i].push((-m.ln(), acc[i]));
                }
            }
            if n < n_hi {
                for y in pos.iter_mut() {
                    *y = model.apply(n, *y);
                }
            }
        }
        return Ok(out);
    }
    points
        .par_iter()
        .map(|&x| {
            let chain = ball_chain(model, space, x, 1, eps, n_hi);
            let mut s = 0.0;
            let mut y = x;
            let mut row = Vec::with_capacity(width);
            for n in 1..=n_hi {
                s += psi.at(y);
                if n >= n_lo {
                    let m = ball_measure(mu, &chain[n - 1]);
                    if !(m > 0.0) {
                        return Err(Error::DegenerateMeasure { point: x, n });
                    }
                    row.push((-m.ln(), s));
                }
                y = model.apply(n, y);
            }
            Ok(row)
        })
        .collect()
}

/// Number of trailing `n` values forming the liminf window.
pub fn tail_length(count: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return input(format!("tail fraction must lie in (0, 1], got {fraction}"));
    }
    Ok(((fraction * count as f64).ceil() as usize).clamp(1, count))
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalExponentProfile {
    pub point: usize,
    pub eps: f64,
    pub series: Vec<(usize, f64)>,
    pub liminf_estimate: f64,
    /// Inclusive range of `n` in the tail window.
    pub tail_window: (usize, usize),
    /// `m` with `eps = 2^-m` on symbolic spaces.
    pub scale_offset: Option<usize>,
    /// Tail minimum of `(-ln mu(B) n / (n + m) + S_n psi) / n` (symbolic
    /// spaces only).
    pub corrected_estimate: Option<f64>,
}

fn tail_minima(n_lo: usize, terms: &[(f64, f64)], tail: usize, m: Option<usize>) -> (f64, Option<f64>) {
    let start = terms.len() - tail;
    let window = (n_lo + start..).zip(&terms[start..]);
    let raw = window.clone().map(|(n, &(a, s))| (a + s) / n as f64).fold(f64::INFINITY, f64::min);
    let corrected = m.map(|m| {
        window
            .map(|(n, &(a, s))| a / (n + m) as f64 + s / n as f64)
            .fold(f64::INFINITY, f64::min)
    });
    (raw, corrected)
}

#[allow(clippy::too_many_arguments)]
pub fn local_pressure_profile(
    space: &FiniteSpace,
    model: &NdsModel,
    mu: &ProbMeasure,
    psi: &Potential,
    x: usize,
    eps: f64,
    n_range: (usize, usize),
    tail_fraction: f64,
) -> Result<LocalExponentProfile> {
    space.check_point(x)?;
    let (n_lo, n_hi) = n_range;
    let terms = profile_values(space, model, mu, psi, &[x], eps, n_lo, n_hi)?.pop().unwrap();
    let series: Vec<(usize, f64)> = (n_lo..=n_hi).zip(&terms).map(|(n, &(a, s))| (n, (a + s) / n as f64)).collect();
    let tail = tail_length(series.len(), tail_fraction)?;
    let m = symbolic_scale_offset(model, eps);
    let (raw, corrected) = tail_minima(n_lo, &terms, tail, m);
    Ok(LocalExponentProfile {
        point: x,
        eps,
        tail_window: (n_hi + 1 - tail, n_hi),
        series,
        liminf_estimate: raw,
        scale_offset: m,
        corrected_estimate: corrected,
    })
}

/// Tail-minimum estimates `(raw, corrected)` at every point of `points`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_estimates(
    space: &FiniteSpace,
    model: &NdsModel,
    mu: &ProbMeasure,
    psi: &Potential,
    points: &[usize],
    eps: f64,
    n_range: (usize, usize),
    tail_fraction: f64,
) -> Result<Vec<(f64, Option<f64>)>> {
    let (n_lo, n_hi) = n_range;
    let values = profile_values(space, model, mu, psi, points, eps, n_lo, n_hi)?;
    let tail = tail_length(n_hi - n_lo + 1, tail_fraction)?;
    let m = symbolic_scale_offset(model, eps);
    Ok(values
        .into_iter()
        .map(|row| tail_minima(n_lo, &row, tail, m))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurePressureRow {
    pub eps: f64,
    /// `sum_x mu(x) liminf_estimate(x)`.
    pub value: f64,
    pub scale_offset: Option<usize>,
    /// Same integral of the corrected estimates.
    pub corrected: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurePressureReport {
    pub n_range: (usize, usize),
    pub tail_fraction: f64,
    pub tail_window: (usize, usize),
    pub rows: Vec<MeasurePressureRow>,
    /// Row at the smallest `eps`.
    pub headline: f64,
    pub headline_corrected: Option<f64>,
}

/// `P_mu(X, psi)` at each `eps` of the schedule, integrated exactly over the
/// support of `mu`. With `psi = 0` this is the lower entropy.
#[allow(clippy::too_many_arguments)]
pub fn measure_pressure(
    space: &FiniteSpace,
    model: &NdsModel,
    mu: &ProbMeasure,
    psi: &Potential,
    eps_schedule: &[f64],
    n_range: (usize, usize),
    tail_fraction: f64,
) -> Result<MeasurePressureReport> {
    if eps_schedule.is_empty() {
        return input("empty eps schedule");
    }
    let support = mu.support();
    let tail = tail_length(n_range.1.saturating_sub(n_range.0) + 1, tail_fraction)?;
    let mut rows = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let est = pointwise_estimates(space, model, mu, psi, &support, eps, n_range, tail_fraction)?;
        let value = support.iter().zip(&est).map(|(&x, e)| mu.mass(x) * e.0).sum();
        let corrected = est[0]
            .1
            .map(|_| support.iter().zip(&est).map(|(&x, e)| mu.mass(x) * e.1.unwrap()).sum());
        rows.push(MeasurePressureRow {
            eps,
            value,
            scale_offset: symbolic_scale_offset(model, eps),
            corrected,
        });
    }
    let smallest = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.eps.total_cmp(&b.1.eps).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap();
    Ok(MeasurePressureReport {
        n_range,
        tail_fraction,
        tail_window: (n_range.1 + 1 - tail, n_range.1),
        headline: rows[smallest].value,
        headline_corrected: rows[smallest].corrected,
        rows,
    })
}
