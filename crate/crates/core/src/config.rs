//! JSON configuration for systems, potentials, target sets, measures and
//! covering-lemma instances.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::measure::{bernoulli_measure, ProbMeasure};
use crate::pointset::TargetSet;
use crate::space::{
    build_circle_multiplication, build_explicit_table, build_product_subset, build_symbolic_shift, dynamical_ball, BallSpec,
    FiniteSpace, Potential, System,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    SymbolicShift {
        k: usize,
        #[serde(rename = "L")]
        len: usize,
    },
    CircleMult {
        multipliers: Vec<u64>,
        /// Must equal the number of multipliers when given.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<usize>,
        #[serde(rename = "N")]
        n: usize,
    },
    ExplicitTable {
        dist: Vec<Vec<f64>>,
        maps: Vec<Vec<u32>>,
    },
}

impl SystemConfig {
    pub fn build(&self) -> Result<System> {
        match self {
            SystemConfig::SymbolicShift { k, len } => build_symbolic_shift(*k, *len),
            SystemConfig::CircleMult { multipliers, period, n } => {
                if let Some(p) = period {
                    if *p != multipliers.len() {
                        return input(format!("period {p} does not match {} multipliers", multipliers.len()));
                    }
                }
                build_circle_multiplication(multipliers, *n)
            }
            SystemConfig::ExplicitTable { dist, maps } => build_explicit_table(dist, maps.clone()),
        }
    }

    /// Short human-readable label.
    pub fn id(&self) -> String {
        match self {
            SystemConfig::SymbolicShift { k, len } => format!("shift-k{k}-L{len}"),
            SystemConfig::CircleMult { multipliers, n, .. } => {
                let a: Vec<String> = multipliers.iter().map(|a| a.to_string()).collect();
                format!("circle-{}-N{n}", a.join("x"))
            }
            SystemConfig::ExplicitTable { dist, maps } => format!("table-P{}-T{}", dist.len(), maps.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    Constant { c: f64 },
    FirstSymbol { phi: Vec<f64> },
    Table { values: Vec<f64> },
}

impl PotentialConfig {
    pub fn build(&self, space: &FiniteSpace) -> Result<Potential> {
        match self {
            PotentialConfig::Zero => Ok(Potential::zero(space.len())),
            PotentialConfig::Constant { c } => {
                if !c.is_finite() {
                    return input(format!("constant potential must be finite, got {c}"));
                }
                Ok(Potential::constant(space.len(), *c))
            }
            PotentialConfig::FirstSymbol { phi } => Potential::first_symbol(space, phi),
            PotentialConfig::Table { values } => {
                if values.len() != space.len() {
                    return input(format!("potential table has {} values, space has {}", values.len(), space.len()));
                }
                Potential::table(values.clone())
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            PotentialConfig::Zero => "zero".into(),
            PotentialConfig::Constant { c } => format!("constant:{c}"),
            PotentialConfig::FirstSymbol { phi } => {
                let v: Vec<String> = phi.iter().map(|p| p.to_string()).collect();
                format!("first-symbol:{}", v.join(","))
            }
            PotentialConfig::Table { values } => format!("table:{}", values.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ZSetConfig {
    All,
    Points { points: Vec<usize> },
    /// Allowed symbols per coordinate of a symbolic space.
    Product { allowed: Vec<Vec<usize>> },
}

impl ZSetConfig {
    pub fn build(&self, space: &FiniteSpace) -> Result<TargetSet> {
        let z = match self {
            ZSetConfig::All => TargetSet::full(space.len()),
            ZSetConfig::Points { points } => {
                for &x in points {
                    space.check_point(x)?;
                }
                TargetSet::from_indices(space.len(), points.iter().copied())
            }
            ZSetConfig::Product { allowed } => build_product_subset(space, allowed)?,
        };
        if z.is_empty() {
            return input("target set is empty");
        }
        Ok(z)
    }

    pub fn id(&self) -> String {
        match self {
            ZSetConfig::All => "all".into(),
            ZSetConfig::Points { points } => format!("points:{}", points.len()),
            ZSetConfig::Product { allowed } => {
                let v: Vec<String> = allowed.iter().map(|a| a.len().to_string()).collect();
                format!("product:{}", v.join("x"))
            }
        }
    }
}

/// Measure given on the command line: `uniform`, `uniform-on-z`,
/// `point:<x>` or `bernoulli:<p_0>,<p_1>,...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MeasureSpec {
    Uniform,
    UniformOnZ,
    Point(usize),
    Bernoulli(Vec<f64>),
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "uniform" if tail.is_empty() => Ok(MeasureSpec::Uniform),
            "uniform-on-z" if tail.is_empty() => Ok(MeasureSpec::UniformOnZ),
            "point" => tail
                .parse()
                .map(MeasureSpec::Point)
                .map_err(|_| Error::Input(format!("bad point index in measure spec {s:?}"))),
            "bernoulli" => tail
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(MeasureSpec::Bernoulli)
                .map_err(|_| Error::Input(format!("bad weights in measure spec {s:?}"))),
            _ => input(format!("unknown measure spec {s:?}")),
        }
    }
}

impl MeasureSpec {
    pub fn build(&self, space: &FiniteSpace, z: &TargetSet) -> Result<ProbMeasure> {
        match self {
            MeasureSpec::Uniform => ProbMeasure::uniform(space.len()),
            MeasureSpec::UniformOnZ => ProbMeasure::uniform_on(z),
            MeasureSpec::Point(x) => ProbMeasure::point_mass(space.len(), *x),
            MeasureSpec::Bernoulli(w) => bernoulli_measure(space, w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub center: usize,
    pub n: usize,
    pub radius: f64,
}

/// Input of the covering-lemma commands. The weighted (`step1`) command also needs
/// `multiplicities` (or real `coefficients`), `log_weights` and `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaInstance {
    pub system: SystemConfig,
    pub balls: Vec<BallConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl LemmaInstance {
    pub fn build_balls(&self, sys: &System) -> Result<Vec<BallSpec>> {
        self.balls
            .iter()
            .map(|b| dynamical_ball(&sys.model, &sys.space, b.center, 1, b.n, b.radius))
            .collect()
    }
}

/// Parses JSON; syntax errors keep serde's line and column.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("{what}: {e}")))
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    from_json_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_configs() {
        let s: SystemConfig = from_json_str(r#"{"kind":"symbolic-shift","k":2,"L":12}"#, "s").unwrap();
        assert_eq!(s.build().unwrap().len(), 4096);
        let c: SystemConfig = from_json_str(r#"{"kind":"circle-mult","multipliers":[2,3],"period":2,"N":7776}"#, "c").unwrap();
        assert_eq!(c.build().unwrap().len(), 7776);
        let p: PotentialConfig = from_json_str(r#"{"kind":"first-symbol","phi":[0.0,0.5]}"#, "p").unwrap();
        let sys = s.build().unwrap();
        assert_eq!(p.build(&sys.space).unwrap().at(4095), 0.5);
        let z: ZSetConfig = from_json_str(r#"{"kind":"points","points":[3,5]}"#, "z").unwrap();
        assert_eq!(z.build(&sys.space).unwrap().count(), 2);
    }

    #[test]
    fn malformed_json_reports_position() {
        let e = from_json_str::<SystemConfig>("{\"kind\":\"symbolic-shift\",\n\"k\":2,", "sys.json").unwrap_err();
        assert!(matches!(&e, Error::Input(m) if m.contains("line 2")), "{e}");
        assert!(from_json_str::<SystemConfig>(r#"{"kind":"torus"}"#, "x").is_err());
    }

    #[test]
    fn measure_specs() {
        assert_eq!("bernoulli:0.3,0.7".parse::<MeasureSpec>().unwrap(), MeasureSpec::Bernoulli(vec![0.3, 0.7]));
        assert_eq!("point:4".parse::<MeasureSpec>().unwrap(), MeasureSpec::Point(4));
        assert!("gauss".parse::<MeasureSpec>().is_err());
        assert!("bernoulli:x".parse::<MeasureSpec>().is_err());
    }
}
