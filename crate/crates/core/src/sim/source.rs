//! Data-generating distributions for simulated observations.
//!
//! Shorthand forms accepted wherever a source is named:
//!
//! * `bernoulli:<p>`
//! * `beta:<a>,<b>` or `beta:<a>,<b>,<bins>` (midpoint discretization)
//! * `discrete:<x>@<p>,<x>@<p>,...`
//! * `discrete2:<x>/<y>@<p>,...` (tuples, for `diffmeans`)
//! * `independent:<source>|<source>` (product of two scalar sources)

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::FiniteDistribution;
use crate::problems::{ProblemSpec, Sample};

pub const DEFAULT_BETA_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceRepr", into = "String")]
pub enum SourceDistribution {
    Bernoulli { p: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
    BetaLike { a: f64, b: f64, bins: usize },
    Discrete2 { atoms: Vec<((f64, f64), f64)> },
    Independent { x: Box<SourceDistribution>, y: Box<SourceDistribution> },
}

/// Table form used in config files, e.g. `{ kind = "bernoulli", p = 0.4 }`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SourceTable {
    Bernoulli {
        p: f64,
    },
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
    #[serde(alias = "beta")]
    BetaLike {
        a: f64,
        b: f64,
        bins: Option<usize>,
    },
    Discrete2 {
        atoms: Vec<((f64, f64), f64)>,
    },
    Independent {
        x: SourceRepr,
        y: SourceRepr,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SourceRepr {
    Short(String),
    Table(Box<SourceTable>),
}

impl TryFrom<SourceRepr> for SourceDistribution {
    type Error = Error;

    fn try_from(r: SourceRepr) -> Result<Self> {
        let s = match r {
            SourceRepr::Short(s) => return s.parse(),
            SourceRepr::Table(t) => match *t {
                SourceTable::Bernoulli { p } => Self::Bernoulli { p },
                SourceTable::Discrete { atoms } => Self::Discrete { atoms },
                SourceTable::BetaLike { a, b, bins } => Self::BetaLike {
                    a,
                    b,
                    bins: bins.unwrap_or(DEFAULT_BETA_BINS),
                },
                SourceTable::Discrete2 { atoms } => Self::Discrete2 { atoms },
                SourceTable::Independent { x, y } => Self::Independent {
                    x: Box::new(x.try_into()?),
                    y: Box::new(y.try_into()?),
                },
            },
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<SourceDistribution> for String {
    fn from(s: SourceDistribution) -> String {
        s.to_string()
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidSource(msg.into())
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(bad(format!("probability {p} is outside [0, 1]")))
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(bad(format!("atom {x} is outside [0, 1]")))
    }
}

fn check_weights<'a>(probs: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    let mut count = 0usize;
    for &p in probs {
        if !(p > 0.0 && p <= 1.0) {
            return Err(bad(format!("atom probability {p} is outside (0, 1]")));
        }
        total += p;
        count += 1;
    }
    if count == 0 {
        return Err(bad("no atoms"));
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(bad(format!("atom probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Normalized midpoint-rule weights of the Beta(a, b) density on `bins`
/// equal cells.
fn beta_atoms(a: f64, b: f64, bins: usize) -> Vec<(f64, f64)> {
    let logs: Vec<(f64, f64)> = (0..bins)
        .map(|i| {
            let x = (i as f64 + 0.5) / bins as f64;
            (x, (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln())
        })
        .collect();
    let max = logs.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<(f64, f64)> = logs.iter().map(|&(x, l)| (x, (l - max).exp())).collect();
    let total: f64 = raw.iter().map(|r| r.1).sum();
    raw.into_iter()
        .map(|(x, w)| (x, w / total))
        .filter(|a| a.1 > 0.0)
        .collect()
}

impl SourceDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { p } => check_prob(*p),
            Self::Discrete { atoms } => {
                for (x, _) in atoms {
                    check_unit(*x)?;
                }
                check_weights(atoms.iter().map(|a| &a.1))
            }
            Self::BetaLike { a, b, bins } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(bad(format!("beta parameters ({a}, {b}) must be positive")));
                }
                if *bins < 2 || *bins > 1 << 20 {
                    return Err(bad(format!("beta bins {bins} must be in [2, 2^20]")));
                }
                Ok(())
            }
            Self::Discrete2 { atoms } => {
                for ((x, y), _) in atoms {
                    check_unit(*x)?;
                    check_unit(*y)?;
                }
                check_weights(atoms.iter().map(|a| &a.1))
            }
            Self::Independent { x, y } => {
                if x.is_tuple() || y.is_tuple() {
                    return Err(bad("independent components must be scalar sources"));
                }
                x.validate()?;
                y.validate()
            }
        }
    }

    /// Whether samples are `(x, y)` tuples.
    pub fn is_tuple(&self) -> bool {
        matches!(self, Self::Discrete2 { .. } | Self::Independent { .. })
    }

    /// Exact support with probabilities, zero-probability atoms dropped.
    pub fn atoms(&self) -> Vec<(Sample, f64)> {
        let scalar = |atoms: Vec<(f64, f64)>| {
            atoms
                .into_iter()
                .filter(|a| a.1 > 0.0)
                .map(|(x, p)| (Sample::Scalar(x), p))
                .collect()
        };
        match self {
            Self::Bernoulli { p } => scalar(vec![(0.0, 1.0 - p), (1.0, *p)]),
            Self::Discrete { atoms } => scalar(atoms.clone()),
            Self::BetaLike { a, b, bins } => scalar(beta_atoms(*a, *b, *bins)),
            Self::Discrete2 { atoms } => atoms
                .iter()
                .map(|&((x, y), p)| (Sample::Tuple(x, y), p))
                .collect(),
            Self::Independent { x, y } => {
                let (xs, ys) = (x.atoms(), y.atoms());
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for &(sx, px) in &xs {
                    for &(sy, py) in &ys {
                        if let (Sample::Scalar(a), Sample::Scalar(b)) = (sx, sy) {
                            out.push((Sample::Tuple(a, b), px * py));
                        }
                    }
                }
                out
            }
        }
    }

    /// Mean of the raw scalar, or of `x - y` for tuples.
    pub fn mean(&self) -> f64 {
        self.atoms()
            .iter()
            .map(|&(s, p)| match s {
                Sample::Scalar(x) => p * x,
                Sample::Tuple(x, y) => p * (x - y),
            })
            .sum()
    }

    /// The alternative as a distribution on e-value pairs.
    pub fn to_finite(&self, problem: &ProblemSpec) -> Result<FiniteDistribution> {
        self.check_problem(problem)?;
        let mut atoms = self.atoms();
        // renormalize products so they pass the exact-sum check
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        for a in atoms.iter_mut() {
            a.1 /= total;
        }
        FiniteDistribution::from_samples(*problem, &atoms)
    }

    pub fn check_problem(&self, problem: &ProblemSpec) -> Result<()> {
        if self.is_tuple() != problem.is_tuple() {
            return Err(Error::InvalidSource(format!(
                "{self} does not produce the observations {problem} needs"
            )));
        }
        Ok(())
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        if let Self::Bernoulli { p } = self {
            return Ok(Sampler::Bernoulli(*p));
        }
        let atoms = self.atoms();
        let index = WeightedIndex::new(atoms.iter().map(|a| a.1))
            .map_err(|e| bad(format!("cannot sample: {e}")))?;
        Ok(Sampler::Table {
            samples: atoms.into_iter().map(|a| a.0).collect(),
            index,
        })
    }
}

/// Draws samples from a [`SourceDistribution`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Bernoulli(f64),
    Table {
        samples: Vec<Sample>,
        index: WeightedIndex<f64>,
    },
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        match self {
            Self::Bernoulli(p) => Sample::Scalar(if rng.gen::<f64>() < *p { 1.0 } else { 0.0 }),
            Self::Table { samples, index } => samples[index.sample(rng)],
        }
    }
}

impl fmt::Display for SourceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            Self::Discrete { atoms } => {
                f.write_str("discrete:")?;
                for (i, (x, p)) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}@{p}")?;
                }
                Ok(())
            }
            Self::BetaLike { a, b, bins } => write!(f, "beta:{a},{b},{bins}"),
            Self::Discrete2 { atoms } => {
                f.write_str("discrete2:")?;
                for (i, ((x, y), p)) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}/{y}@{p}")?;
                }
                Ok(())
            }
            Self::Independent { x, y } => write!(f, "independent:{x}|{y}"),
        }
    }
}

fn num(s: &str, whole: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(format!("`{whole}`: cannot read number `{s}`")))
}

fn weighted<T>(body: &str, whole: &str, mut value: impl FnMut(&str) -> Result<T>) -> Result<Vec<(T, f64)>> {
    body.split(',')
        .map(|item| {
            let (v, p) = item
                .split_once('@')
                .ok_or_else(|| bad(format!("`{whole}`: expected <value>@<prob>, got `{item}`")))?;
            Ok((value(v)?, num(p, whole)?))
        })
        .collect()
}

impl FromStr for SourceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let whole = s.trim();
        let (kind, body) = whole
            .split_once(':')
            .ok_or_else(|| bad(format!("`{whole}`: expected <kind>:<parameters>")))?;
        let src = match kind.trim() {
            "bernoulli" => Self::Bernoulli { p: num(body, whole)? },
            "beta" => {
                let parts: Vec<&str> = body.split(',').collect();
                let bins = match parts.len() {
                    2 => DEFAULT_BETA_BINS,
                    3 => parts[2]
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("`{whole}`: cannot read bin count")))?,
                    _ => return Err(bad(format!("`{whole}`: expected beta:<a>,<b>[,<bins>]"))),
                };
                Self::BetaLike {
                    a: num(parts[0], whole)?,
                    b: num(parts[1], whole)?,
                    bins,
                }
            }
            "discrete" => Self::Discrete {
                atoms: weighted(body, whole, |v| num(v, whole))?,
            },
            "discrete2" => Self::Discrete2 {
                atoms: weighted(body, whole, |v| {
                    let (x, y) = v
                        .split_once('/')
                        .ok_or_else(|| bad(format!("`{whole}`: expected <x>/<y>, got `{v}`")))?;
                    Ok((num(x, whole)?, num(y, whole)?))
                })?,
            },
            "independent" => {
                let (x, y) = body
                    .split_once('|')
                    .ok_or_else(|| bad(format!("`{whole}`: expected independent:<source>|<source>")))?;
                Self::Independent {
                    x: Box::new(x.parse()?),
                    y: Box::new(y.parse()?),
                }
            }
            other => return Err(bad(format!("unknown source kind `{other}`"))),
        };
        src.validate()?;
        Ok(src)
    }
}
