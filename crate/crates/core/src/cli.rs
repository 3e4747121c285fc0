//! Command-line front end. Exit codes: 0 success, 2 input error, 3 resource
//! cap, 4 failed check, 1 anything else.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{cached_family, FamilyCache};
use crate::config::{load_json, LemmaInstance, MeasureSpec, PotentialConfig, SystemConfig, ZSetConfig};
use crate::cover::{BoundKind, CoverMode, Variant};
use crate::covering::{
    integer_weight_disjointify, real_weight_disjointify, three_r_disjointify, vitali_5r, DEFAULT_DENOMINATOR,
};
use crate::error::{Error, Result};
use crate::frostman::{frostman_from_family, verify_frostman, FrostmanCheck, FrostmanMeasure};
use crate::instances::{random_3r_instance, random_5r_instance, random_step1_instance, rng};
use crate::measure::measure_pressure;
use crate::output::{to_json, write_json, write_text};
use crate::pointset::TargetSet;
use crate::pressure::{critical_alpha_family, horizon_check, BisectionConfig, PressureEstimate};
use crate::space::{dynamical_ball, Potential, System};
use crate::varprin::{auto_candidates, run_variational_check, Candidate, CandidateKind, Labels, Scale, VariationalOptions};
use crate::weighted::{weighted_inequality_check, weighted_critical_alpha_family};

#[derive(Parser, Debug, Serialize)]
#[command(name = "ndsthermo", version, about = "Finite-scale pressure and entropy of non-autonomous systems")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for randomized instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Inspect a system.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Critical exponents of cover sums.
    #[command(subcommand)]
    Pressure(PressureCmd),
    /// Measure-theoretic pressure.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Frostman measure from the weighted cover dual.
    Frostman(FrostmanArgs),
    /// Covering lemmas on explicit instances.
    #[command(subcommand)]
    Lemma(LemmaCmd),
    /// Numerical checks; exit code 4 when one fails.
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Args, Debug, Serialize)]
struct SystemArgs {
    #[arg(long)]
    system: PathBuf,
    /// Potential config; zero when omitted.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Target set config; the whole space when omitted.
    #[arg(long)]
    zset: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct OutArg {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
enum SpaceCmd {
    Info {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        out: OutArg,
    },
    Ball {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        center: usize,
        #[arg(long, default_value_t = 1)]
        start: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum VariantArg {
    Sup,
    Center,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ModeArg {
    Exact,
    Greedy,
    Lp,
    Auto,
}

impl From<ModeArg> for CoverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => CoverMode::Exact,
            ModeArg::Greedy => CoverMode::Greedy,
            ModeArg::Lp => CoverMode::Lp,
            ModeArg::Auto => CoverMode::Auto,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct BisectArgs {
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl BisectArgs {
    fn config(&self) -> BisectionConfig {
        BisectionConfig {
            tol: self.tol,
            theta: self.theta,
            ..BisectionConfig::default()
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
enum PressureCmd {
    Bowen {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Sup)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        bisect: BisectArgs,
        #[command(flatten)]
        out: OutArg,
    },
    Weighted {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
        #[command(flatten)]
        bisect: BisectArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum MeasureCmd {
    Pressure {
        #[command(flatten)]
        sys: SystemArgs,
        /// `uniform`, `uniform-on-z`, `point:<x>` or `bernoulli:<p0>,<p1>,...`
        #[arg(long)]
        measure: String,
        #[arg(long = "eps-schedule", value_delimiter = ',', required = true)]
        eps_schedule: Vec<f64>,
        /// `n_lo:n_hi`
        #[arg(long)]
        nrange: String,
        #[arg(long, default_value_t = 0.5)]
        tail: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug, Serialize)]
struct FrostmanArgs {
    #[command(flatten)]
    sys: SystemArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long = "bigN")]
    big_n: usize,
    #[arg(long)]
    nmax: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct LemmaArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Accepted for compatibility: certificates are always verified.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand, Debug, Serialize)]
enum LemmaCmd {
    /// Disjoint subfamily whose 3-fold enlargements cover every ball.
    Cover3r(LemmaArgs),
    /// Vitali selection with 5-fold enlargements.
    Cover5r(LemmaArgs),
    /// Disjoint subfamily carrying the weight of the multiplicity level set.
    Step1(LemmaArgs),
}

#[derive(Subcommand, Debug, Serialize)]
enum CheckCmd {
    /// Cover, weighted and measure pressures side by side at each scale.
    Varprin {
        #[command(flatten)]
        sys: SystemArgs,
        /// JSON list of `{"eps", "n_min", "n_max"}`.
        #[arg(long)]
        scales: PathBuf,
        /// `auto` or a `;`-separated list of measure specs.
        #[arg(long, default_value = "auto")]
        measures: String,
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
        #[arg(long, default_value_t = 0.5)]
        tail: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Ball-cover sum at (alpha + delta, 6 eps) against the weighted sum at (alpha, eps).
    Prop42 {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// `auto` or an integer.
        #[arg(long = "bigN", default_value = "auto")]
        big_n: String,
        #[arg(long)]
        nmax: usize,
        /// `a0:a1:steps`
        #[arg(long)]
        alphas: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Center-value against sup-value exponents over growing horizons.
    Thm31 {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        bisect: BisectArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fuzzes the three covering lemmas on seeded random instances.
    Lemmas {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool_version: &'static str,
    config: &'a Cli,
    seed: u64,
    threads: usize,
    wall_clock_seconds: f64,
    outputs: Vec<String>,
}

struct Loaded {
    config: SystemConfig,
    system: System,
    psi: Potential,
    psi_id: String,
    z: TargetSet,
    z_id: String,
}

fn load(args: &SystemArgs) -> Result<Loaded> {
    let config: SystemConfig = load_json(&args.system)?;
    let system = config.build()?;
    let pc: PotentialConfig = match &args.potential {
        Some(p) => load_json(p)?,
        None => PotentialConfig::Zero,
    };
    let zc: ZSetConfig = match &args.zset {
        Some(p) => load_json(p)?,
        None => ZSetConfig::All,
    };
    Ok(Loaded {
        psi: pc.build(&system.space)?,
        psi_id: pc.id(),
        z: zc.build(&system.space)?,
        z_id: zc.id(),
        config,
        system,
    })
}

fn system_key(c: &SystemConfig) -> String {
    serde_json::to_string(c).unwrap_or_default()
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::Input(format!("expected lo:hi, got {s:?}")))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| Error::Input(format!("bad integer {v:?} in {s:?}")));
    Ok((parse(a)?, parse(b)?))
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Input(format!("expected a0:a1:steps, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a0: f64 = parts[0].parse().map_err(|_| bad())?;
    let a1: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    match steps {
        0 => Err(bad()),
        1 => Ok(vec![a0]),
        _ => Ok((0..steps).map(|i| a0 + (a1 - a0) * i as f64 / (steps - 1) as f64).collect()),
    }
}

/// Outcome of a subcommand: a result to write and whether a check failed.
struct Outcome {
    json: String,
    summary: String,
    failed: bool,
    extra: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn ok<T: Serialize>(value: &T, summary: String) -> Result<Self> {
        Ok(Outcome {
            json: to_json(value)?,
            summary,
            failed: false,
            extra: Vec::new(),
        })
    }
}

#[derive(Serialize)]
struct BowenOutput {
    alpha_star: f64,
    bracket: (f64, f64),
    eps: f64,
    n_range: (usize, usize),
    variant: Variant,
    #[serde(serialize_with = "crate::output::pairs")]
    objective_curve: Vec<(f64, f64)>,
    bound_kind: BoundKind,
    iterations: usize,
}

fn bowen_output(e: &PressureEstimate, variant: Variant) -> BowenOutput {
    BowenOutput {
        alpha_star: e.alpha_star,
        bracket: e.bracket,
        eps: e.eps.unwrap_or(f64::NAN),
        n_range: (e.n_min, e.n_max),
        variant,
        objective_curve: e.objective_curve.clone(),
        bound_kind: e.bound_kind,
        iterations: e.iterations,
    }
}

#[derive(Serialize)]
struct FrostmanOutput {
    certificate: FrostmanMeasure,
    verification: FrostmanCheck,
}

#[derive(Serialize)]
struct LemmaFuzzReport {
    seed: u64,
    count: usize,
    three_r_pass: usize,
    five_r_pass: usize,
    step1_pass: usize,
    failures: Vec<String>,
    pass: bool,
}

fn lemma_run(kind: &LemmaCmd) -> Result<Outcome> {
    let (LemmaCmd::Cover3r(a) | LemmaCmd::Cover5r(a) | LemmaCmd::Step1(a)) = kind;
    let inst: LemmaInstance = load_json(&a.instance)?;
    let sys = inst.system.build()?;
    let balls = inst.build_balls(&sys)?;
    if balls.is_empty() {
        return Err(Error::Input("instance has no balls".into()));
    }
    match kind {
        LemmaCmd::Cover3r(_) => {
            let r = three_r_disjointify(&sys.space, &sys.model, &balls)?;
            Outcome::ok(&r, format!("3r: {} of {} balls selected, certificates verified", r.selected.len(), balls.len()))
        }
        LemmaCmd::Cover5r(_) => {
            let r = vitali_5r(&sys.space, &sys.model, &balls)?;
            Outcome::ok(&r, format!("5r: {} of {} balls selected, certificates verified", r.selected.len(), balls.len()))
        }
        LemmaCmd::Step1(_) => {
            let w = inst.log_weights.clone().ok_or_else(|| Error::Input("step1 needs log_weights".into()))?;
            let t = inst.t.ok_or_else(|| Error::Input("step1 needs t".into()))?;
            if let Some(c) = &inst.multiplicities {
                let r = integer_weight_disjointify(&sys.space, &sys.model, &balls, c, &w, t)?;
                let s = format!("step1: |J| = {}, |Z_t| = {}, ln sum_J w = {:.6} <= {:.6}", r.selected.len(), r.z_t.len(), r.lhs_log, r.rhs_log);
                Outcome::ok(&r, s)
            } else if let Some(c) = &inst.coefficients {
                let r = real_weight_disjointify(&sys.space, &sys.model, &balls, c, &w, t, DEFAULT_DENOMINATOR)?;
                let s = format!("step1 (D = {}): |J| = {}, |Z_t| = {}", r.denominator, r.result.selected.len(), r.result.z_t.len());
                Outcome::ok(&r, s)
            } else {
                Err(Error::Input("step1 needs multiplicities or coefficients".into()))
            }
        }
    }
}

/// Runs `count` random instances of each lemma from `seed`. A lemma that
/// returns an error counts as a failure.
fn lemma_fuzz(seed: u64, count: usize) -> Result<LemmaFuzzReport> {
    let results: Vec<[std::result::Result<(), String>; 3]> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed.wrapping_add(i));
            let run = |inst: LemmaInstance, which: usize| -> std::result::Result<(), String> {
                let sys = inst.system.build().map_err(|e| e.to_string())?;
                let balls = inst.build_balls(&sys).map_err(|e| e.to_string())?;
                let res = match which {
                    0 => three_r_disjointify(&sys.space, &sys.model, &balls).map(|_| ()),
                    1 => vitali_5r(&sys.space, &sys.model, &balls).map(|_| ()),
                    _ => integer_weight_disjointify(
                        &sys.space,
                        &sys.model,
                        &balls,
                        inst.multiplicities.as_deref().unwrap_or(&[]),
                        inst.log_weights.as_deref().unwrap_or(&[]),
                        inst.t.unwrap_or(1.0),
                    )
                    .map(|_| ()),
                };
                res.map_err(|e| format!("instance {i}: {e}"))
            };
            [
                run(random_3r_instance(&mut r), 0),
                run(random_5r_instance(&mut r), 1),
                run(random_step1_instance(&mut r), 2),
            ]
        })
        .collect();
    let mut pass = [0usize; 3];
    let mut failures = Vec::new();
    for row in results {
        for (j, r) in row.into_iter().enumerate() {
            match r {
                Ok(()) => pass[j] += 1,
                Err(e) => failures.push(e),
            }
        }
    }
    Ok(LemmaFuzzReport {
        seed,
        count,
        three_r_pass: pass[0],
        five_r_pass: pass[1],
        step1_pass: pass[2],
        pass: failures.is_empty(),
        failures,
    })
}

fn candidates_from(spec: &str, l: &Loaded) -> Result<Vec<Candidate>> {
    if spec.trim() == "auto" {
        return auto_candidates(&l.system.space, &l.z);
    }
    spec.split(';')
        .map(|s| {
            let s = s.trim();
            if s == "frostman" {
                return Ok(Candidate {
                    id: s.into(),
                    kind: CandidateKind::Frostman { offset: 1e-3 },
                });
            }
            let mu = s.parse::<MeasureSpec>()?.build(&l.system.space, &l.z)?;
            Ok(Candidate {
                id: s.into(),
                kind: CandidateKind::Fixed(mu),
            })
        })
        .collect()
}

fn run(cli: &Cli, cache: Option<&FamilyCache>) -> Result<Outcome> {
    match &cli.command {
        Command::Space(SpaceCmd::Info { sys, .. }) => {
            let l = load(sys)?;
            #[derive(Serialize)]
            struct Info {
                id: String,
                kind: &'static str,
                points: usize,
                diameter: f64,
                symbolic: Option<(usize, usize)>,
                z_points: usize,
            }
            let info = Info {
                id: l.config.id(),
                kind: l.system.model.kind_name(),
                points: l.system.len(),
                diameter: l.system.space.diameter(),
                symbolic: l.system.space.symbolic_shape(),
                z_points: l.z.count(),
            };
            let s = format!("{}: {} points, diameter {}", info.id, info.points, info.diameter);
            Outcome::ok(&info, s)
        }
        Command::Space(SpaceCmd::Ball { sys, center, start, n, eps, .. }) => {
            let l = load(sys)?;
            let b = dynamical_ball(&l.system.model, &l.system.space, *center, *start, *n, *eps)?;
            let mut summary = format!("B({center}, {start}, {n}, {eps}) has {} points", b.members.len());
            if l.system.space.attains_distance(*eps) {
                summary.push_str("; warning: eps is an attained distance");
            }
            Outcome::ok(&b, summary)
        }
        Command::Pressure(PressureCmd::Bowen { sys, eps, nmin, nmax, variant, mode, bisect, .. }) => {
            let l = load(sys)?;
            if nmin > nmax || *nmin < 1 {
                return Err(Error::Input(format!("need 1 <= nmin <= nmax, got {nmin}:{nmax}")));
            }
            let v = match variant {
                VariantArg::Sup => Variant::Sup,
                VariantArg::Center => Variant::Center,
            };
            let fam = cached_family(cache, &system_key(&l.config), &l.system.space, &l.system.model, &l.psi, *eps, *nmax, *nmax)?;
            let mut e = critical_alpha_family(&fam, &l.psi, &l.z, v, (*mode).into(), &bisect.config())?;
            e.n_min = *nmin;
            let s = format!("alpha* = {:.9} ({:?})", e.alpha_star, e.bound_kind);
            Outcome::ok(&bowen_output(&e, v), s)
        }
        Command::Pressure(PressureCmd::Weighted { sys, eps, nmin, nmax, bisect, .. }) => {
            let l = load(sys)?;
            if nmin > nmax || *nmin < 1 {
                return Err(Error::Input(format!("need 1 <= nmin <= nmax, got {nmin}:{nmax}")));
            }
            let fam = cached_family(cache, &system_key(&l.config), &l.system.space, &l.system.model, &l.psi, *eps, *nmax, *nmax)?;
            let mut e = weighted_critical_alpha_family(&fam, &l.psi, &l.z, &bisect.config())?;
            e.n_min = *nmin;
            let s = format!("weighted alpha* = {:.9}", e.alpha_star);
            Outcome::ok(&e, s)
        }
        Command::Measure(MeasureCmd::Pressure { sys, measure, eps_schedule, nrange, tail, .. }) => {
            let l = load(sys)?;
            let mu = measure.parse::<MeasureSpec>()?.build(&l.system.space, &l.z)?;
            let r = measure_pressure(&l.system.space, &l.system.model, &mu, &l.psi, eps_schedule, parse_range(nrange)?, *tail)?;
            let mut s = format!("P_mu = {:.6}", r.headline);
            if let Some(c) = r.headline_corrected {
                s.push_str(&format!(" (corrected {c:.6})"));
            }
            Outcome::ok(&r, s)
        }
        Command::Frostman(a) => {
            let l = load(&a.sys)?;
            let fam = cached_family(cache, &system_key(&l.config), &l.system.space, &l.system.model, &l.psi, a.eps, a.big_n, a.nmax)?;
            let cert = frostman_from_family(&fam, &l.z, a.alpha, a.big_n)?;
            let check = verify_frostman(&fam, &l.z, &cert);
            let s = format!(
                "ln c = {:.6}, {} balls checked, {} violations",
                cert.log_c,
                check.balls_checked,
                check.violations.len()
            );
            let failed = !check.pass;
            let mut o = Outcome::ok(&FrostmanOutput { certificate: cert, verification: check }, s)?;
            o.failed = failed;
            Ok(o)
        }
        Command::Lemma(kind) => lemma_run(kind),
        Command::Check(CheckCmd::Varprin { sys, scales, measures, slack, tail, csv, .. }) => {
            let l = load(sys)?;
            let scales: Vec<Scale> = load_json(scales)?;
            let cands = candidates_from(measures, &l)?;
            let labels = Labels {
                system_id: l.config.id(),
                z_id: l.z_id.clone(),
                psi_id: l.psi_id.clone(),
            };
            let opts = VariationalOptions {
                slack: *slack,
                tail_fraction: *tail,
                ..VariationalOptions::default()
            };
            let r = run_variational_check(&l.system.space, &l.system.model, &l.psi, &l.z, &scales, &cands, &labels, &opts)?;
            let word = if r.entropy_mode { "entropy" } else { "pressure" };
            let mut s = String::new();
            for row in &r.rows {
                s.push_str(&format!(
                    "eps={} n={}..{}: {word} B {:.6}, W {:.6}, best measure {:.6} ({}), gap {:.6} {}\n",
                    row.eps,
                    row.n_min,
                    row.n_max,
                    row.p_b,
                    row.p_w,
                    row.best_measure_pressure,
                    row.best_measure_id,
                    row.gap,
                    if row.pass { "pass" } else { "FAIL" }
                ));
            }
            let mut o = Outcome::ok(&r, s.trim_end().to_string())?;
            o.failed = !r.pass;
            if let Some(p) = csv {
                o.extra.push((p.clone(), r.to_csv()));
            }
            Ok(o)
        }
        Command::Check(CheckCmd::Prop42 { sys, eps, delta, big_n, nmax, alphas, mode, .. }) => {
            let l = load(sys)?;
            let big_n = match big_n.as_str() {
                "auto" => None,
                v => Some(v.parse::<usize>().map_err(|_| Error::Input(format!("bad --bigN {v:?}")))?),
            };
            let grid = parse_grid(alphas)?;
            let r = weighted_inequality_check(&l.system.space, &l.system.model, &l.psi, *eps, &l.z, big_n, *nmax, *delta, &grid, (*mode).into())?;
            let s = format!("N = {}: {} of {} grid points violate", r.big_n, r.violations, r.rows.len());
            let mut o = Outcome::ok(&r, s)?;
            o.failed = !r.pass;
            Ok(o)
        }
        Command::Check(CheckCmd::Thm31 { sys, eps, horizons, mode, bisect, .. }) => {
            let l = load(sys)?;
            let r = horizon_check(&l.system.space, &l.system.model, &l.psi, *eps, &l.z, horizons, (*mode).into(), &bisect.config())?;
            let mut s = String::new();
            for row in &r.rows {
                s.push_str(&format!(
                    "n={}: P {:.6}, scriptP {:.6}, lambda {:.6} {}\n",
                    row.n_max,
                    row.p_sup,
                    row.p_center,
                    row.lambda,
                    if row.pass { "pass" } else { "FAIL" }
                ));
            }
            let mut o = Outcome::ok(&r, s.trim_end().to_string())?;
            o.failed = !r.pass;
            Ok(o)
        }
        Command::Check(CheckCmd::Lemmas { count, .. }) => {
            let r = lemma_fuzz(cli.seed, *count)?;
            let s = format!(
                "3r {}/{count}, 5r {}/{count}, step1 {}/{count}",
                r.three_r_pass, r.five_r_pass, r.step1_pass
            );
            let mut o = Outcome::ok(&r, s)?;
            o.failed = !r.pass;
            Ok(o)
        }
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    let o = match &cli.command {
        Command::Space(SpaceCmd::Info { out, .. } | SpaceCmd::Ball { out, .. }) => out,
        Command::Pressure(PressureCmd::Bowen { out, .. } | PressureCmd::Weighted { out, .. }) => out,
        Command::Measure(MeasureCmd::Pressure { out, .. }) => out,
        Command::Frostman(a) => &a.out,
        Command::Lemma(LemmaCmd::Cover3r(a) | LemmaCmd::Cover5r(a) | LemmaCmd::Step1(a)) => &a.out,
        Command::Check(
            CheckCmd::Varprin { out, .. } | CheckCmd::Prop42 { out, .. } | CheckCmd::Thm31 { out, .. } | CheckCmd::Lemmas { out, .. },
        ) => out,
    };
    o.out.as_deref()
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let cache = FamilyCache::from_env();
    let outcome = pool.install(|| run(&cli, cache.as_ref()));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    println!("{}", outcome.summary);
    let mut outputs = Vec::new();
    let written = (|| -> Result<()> {
        if let Some(p) = out_path(&cli) {
            write_text(p, &outcome.json)?;
            outputs.push(p.display().to_string());
        }
        for (p, text) in &outcome.extra {
            write_text(p, text)?;
            outputs.push(p.display().to_string());
        }
        if let Some(p) = out_path(&cli) {
            let manifest = RunManifest {
                tool_version: env!("CARGO_PKG_VERSION"),
                config: &cli,
                seed: cli.seed,
                threads: cli.threads,
                wall_clock_seconds: started.elapsed().as_secs_f64(),
                outputs: outputs.clone(),
            };
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest.json");
            write_json(Path::new(&name), &manifest)?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    if outcome.failed {
        4
    } else {
        0
    }
}

pub fn main() -> ! {
    env_logger::init();
    std::process::exit(dispatch(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_ranges() {
        assert_eq!(parse_range("8:16").unwrap(), (8, 16));
        assert!(parse_range("8").is_err());
        let g = parse_grid("0:1:5").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn help_and_usage_codes() {
        assert_eq!(dispatch(["ndsthermo", "pressure", "bowen", "--help"]), 0);
        assert_eq!(dispatch(["ndsthermo", "pressure", "bowen", "--bogus"]), 2);
        assert_eq!(dispatch(["ndsthermo", "teleport"]), 2);
    }

    #[test]
    fn lemma_fuzz_passes() {
        let r = lemma_fuzz(5, 10).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.three_r_pass, 10);
    }
}
