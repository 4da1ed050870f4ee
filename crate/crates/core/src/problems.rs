//! Testing problems as maps from raw observations to e-value pairs.
//!
//! * `bounded2:<mu0>`: `H0: E[X] = mu0` for `X` in `[0, 1]`, pairs
//!   `((1 - x) / (1 - mu0), x / mu0)`.
//! * `bounded1:<mu0>`: `H0: E[X] <= mu0`, pairs `(1, x / mu0)` (cash plus
//!   one risky asset).
//! * `diffmeans`: `H0: E[X - Y] = 0` for tuples in `[0, 1]^2`, reduced to
//!   the two-sided problem on `z = (x - y + 1) / 2` with `mu0 = 1/2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wealth::{Bet, EValuePair};

fn check_unit(value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::ObservationOutOfRange { value })
    }
}

fn check_mu0(mu0: f64) -> Result<f64> {
    if mu0 > 0.0 && mu0 < 1.0 {
        Ok(mu0)
    } else {
        Err(Error::InvalidNullMean(mu0))
    }
}

/// `((1 - x) / (1 - mu0), x / mu0)`.
pub fn two_sided_pair(x: f64, mu0: f64) -> Result<EValuePair> {
    let x = check_unit(x)?;
    let mu0 = check_mu0(mu0)?;
    EValuePair::new((1.0 - x) / (1.0 - mu0), x / mu0)
}

/// `(1, x / mu0)`.
pub fn one_sided_pair(x: f64, mu0: f64) -> Result<EValuePair> {
    let x = check_unit(x)?;
    let mu0 = check_mu0(mu0)?;
    EValuePair::new(1.0, x / mu0)
}

/// `two_sided_pair((x - y + 1) / 2, 1/2)`, i.e. `(1 - d, 1 + d)` with `d = x - y`.
pub fn diff_means_pair(x: f64, y: f64) -> Result<EValuePair> {
    two_sided_pair(diff_means_z(x, y)?, 0.5)
}

fn diff_means_z(x: f64, y: f64) -> Result<f64> {
    let x = check_unit(x)?;
    let y = check_unit(y)?;
    Ok((x - y + 1.0) / 2.0)
}

/// Two-sided reparameterization `lambda = mu0 + gamma * mu0 * (1 - mu0)`.
pub fn gamma_to_lambda(gamma: f64, mu0: f64) -> Result<Bet> {
    let mu0 = check_mu0(mu0)?;
    let (lo, hi) = (-1.0 / (1.0 - mu0), 1.0 / mu0);
    if !(gamma >= lo && gamma <= hi) {
        return Err(Error::GammaOutOfRange { gamma, lo, hi });
    }
    Ok(Bet::clamped(mu0 + gamma * mu0 * (1.0 - mu0)))
}

/// Inverse of [`gamma_to_lambda`].
pub fn lambda_to_gamma(bet: Bet, mu0: f64) -> Result<f64> {
    let mu0 = check_mu0(mu0)?;
    Ok((bet.value() - mu0) / (mu0 * (1.0 - mu0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    BoundedTwoSided,
    BoundedOneSided,
    DiffMeans,
}

/// A raw observation: a scalar in `[0, 1]`, or a tuple for `diffmeans`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    Scalar(f64),
    Tuple(f64, f64),
}

/// What a strategy sees each round: the reduced scalar on `[0, 1]` (for
/// strategies parameterized by `x` and `mu0`) and the e-value pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub x: f64,
    pub pair: EValuePair,
}

impl Observation {
    /// An observation whose scalar is recovered from a two-sided pair.
    pub fn from_pair(pair: EValuePair) -> Self {
        Self { x: f64::NAN, pair }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ProblemSpec {
    kind: ProblemKind,
    mu0: f64,
}

impl ProblemSpec {
    pub fn bounded_two_sided(mu0: f64) -> Result<Self> {
        Ok(Self {
            kind: ProblemKind::BoundedTwoSided,
            mu0: check_mu0(mu0)?,
        })
    }

    pub fn bounded_one_sided(mu0: f64) -> Result<Self> {
        Ok(Self {
            kind: ProblemKind::BoundedOneSided,
            mu0: check_mu0(mu0)?,
        })
    }

    pub fn diff_means() -> Self {
        Self {
            kind: ProblemKind::DiffMeans,
            mu0: 0.5,
        }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn is_tuple(&self) -> bool {
        self.kind == ProblemKind::DiffMeans
    }

    /// Maps a raw sample to the reduced scalar and its e-value pair.
    pub fn observe(&self, sample: Sample) -> Result<Observation> {
        let x = match (self.kind, sample) {
            (ProblemKind::DiffMeans, Sample::Tuple(x, y)) => diff_means_z(x, y)?,
            (ProblemKind::DiffMeans, Sample::Scalar(_)) => {
                return Err(Error::InvalidSource(
                    "diffmeans needs (x, y) tuples".to_string(),
                ))
            }
            (_, Sample::Scalar(x)) => check_unit(x)?,
            (_, Sample::Tuple(..)) => {
                return Err(Error::InvalidSource(format!(
                    "{self} needs scalar observations"
                )))
            }
        };
        let pair = match self.kind {
            ProblemKind::BoundedOneSided => one_sided_pair(x, self.mu0)?,
            _ => two_sided_pair(x, self.mu0)?,
        };
        Ok(Observation { x, pair })
    }

    pub fn pair(&self, sample: Sample) -> Result<EValuePair> {
        self.observe(sample).map(|o| o.pair)
    }

    /// Admissible gamma interval for this problem.
    pub fn gamma_range(&self) -> (f64, f64) {
        match self.kind {
            ProblemKind::BoundedOneSided => (0.0, 1.0 / self.mu0),
            _ => (-1.0 / (1.0 - self.mu0), 1.0 / self.mu0),
        }
    }

    /// Bet on the pair scale equivalent to `1 + gamma (x - mu0)`.
    pub fn gamma_to_lambda(&self, gamma: f64) -> Result<Bet> {
        match self.kind {
            ProblemKind::BoundedOneSided => {
                let (lo, hi) = self.gamma_range();
                if !(gamma >= lo && gamma <= hi) {
                    return Err(Error::GammaOutOfRange { gamma, lo, hi });
                }
                Ok(Bet::clamped(gamma * self.mu0))
            }
            _ => gamma_to_lambda(gamma, self.mu0),
        }
    }

    pub fn lambda_to_gamma(&self, bet: Bet) -> f64 {
        match self.kind {
            ProblemKind::BoundedOneSided => bet.value() / self.mu0,
            _ => (bet.value() - self.mu0) / (self.mu0 * (1.0 - self.mu0)),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ProblemKind::BoundedTwoSided => write!(f, "bounded2:{}", self.mu0),
            ProblemKind::BoundedOneSided => write!(f, "bounded1:{}", self.mu0),
            ProblemKind::DiffMeans => write!(f, "diffmeans"),
        }
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "diffmeans" {
            return Ok(Self::diff_means());
        }
        let unknown = || Error::UnknownProblem(s.to_string());
        let (name, arg) = s.split_once(':').ok_or_else(unknown)?;
        let mu0: f64 = arg.trim().parse().map_err(|_| unknown())?;
        match name.trim() {
            "bounded2" => Self::bounded_two_sided(mu0),
            "bounded1" => Self::bounded_one_sided(mu0),
            _ => Err(unknown()),
        }
    }
}

impl TryFrom<String> for ProblemSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ProblemSpec> for String {
    fn from(p: ProblemSpec) -> String {
        p.to_string()
    }
}
