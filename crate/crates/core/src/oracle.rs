//! Log-optimal constant bets for finite-support alternatives.
//!
//! For an alternative `Q` on finitely many pairs, `ell_Q(lambda) =
//! E_Q[log mix(lambda, pair)]` is evaluated exactly and maximized over
//! `[0, 1]`. The maximizer is the numeraire: `E_Q[mix(l) / mix(l*)] <= 1`
//! for every `l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{ProblemSpec, Sample};
use crate::wealth::{mix, Bet, EValuePair, LogMixObjective};

const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub pair: EValuePair,
    pub prob: f64,
    /// Raw sample that produced `pair`, when known.
    pub sample: Option<Sample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    atoms: Vec<Atom>,
    terms: Vec<(EValuePair, f64)>,
    problem: Option<ProblemSpec>,
}

impl FiniteDistribution {
    /// Distribution directly on pairs, with no problem context.
    pub fn new(atoms: Vec<(EValuePair, f64)>) -> Result<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(pair, prob)| Atom {
                pair,
                prob,
                sample: None,
            })
            .collect();
        Self::build(atoms, None)
    }

    /// Distribution on raw samples, mapped through `problem`.
    pub fn from_samples(problem: ProblemSpec, atoms: &[(Sample, f64)]) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|&(sample, prob)| {
                Ok(Atom {
                    pair: problem.pair(sample)?,
                    prob,
                    sample: Some(sample),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(atoms, Some(problem))
    }

    /// `Bernoulli(q)` observations under a scalar problem.
    pub fn bernoulli(problem: ProblemSpec, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidDistribution(format!("Bernoulli parameter {q} is outside [0, 1]")));
        }
        let mut atoms = Vec::new();
        if q < 1.0 {
            atoms.push((Sample::Scalar(0.0), 1.0 - q));
        }
        if q > 0.0 {
            atoms.push((Sample::Scalar(1.0), q));
        }
        Self::from_samples(problem, &atoms)
    }

    fn build(atoms: Vec<Atom>, problem: Option<ProblemSpec>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".to_string()));
        }
        for a in &atoms {
            if !(a.prob > 0.0 && a.prob <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {} is outside (0, 1]",
                    a.prob
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let terms = atoms.iter().map(|a| (a.pair, a.prob)).collect();
        Ok(Self {
            atoms,
            terms,
            problem,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn problem(&self) -> Option<&ProblemSpec> {
        self.problem.as_ref()
    }

    fn scalars(&self) -> Option<Vec<(f64, f64)>> {
        self.atoms
            .iter()
            .map(|a| match a.sample? {
                Sample::Scalar(x) => Some((x, a.prob)),
                Sample::Tuple(x, y) => Some((x - y, a.prob)),
            })
            .collect()
    }

    /// `E_Q[X] - mu0` (or `E_Q[X - Y]` for tuples), when samples are known.
    pub fn delta(&self) -> Option<f64> {
        let problem = self.problem?;
        let s = self.scalars()?;
        let mean: f64 = s.iter().map(|(x, p)| x * p).sum();
        Some(if problem.is_tuple() { mean } else { mean - problem.mu0() })
    }

    /// Variance of the raw scalar (or of `X - Y`), when samples are known.
    pub fn variance(&self) -> Option<f64> {
        let s = self.scalars()?;
        let mean: f64 = s.iter().map(|(x, p)| x * p).sum();
        Some(s.iter().map(|(x, p)| p * (x - mean).powi(2)).sum())
    }

    fn objective(&self) -> LogMixObjective<'_> {
        LogMixObjective::new(&self.terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub lambda_star: Bet,
    /// Bet in the `gamma` scale of the attached problem.
    pub gamma_star: Option<f64>,
    pub ell_star: f64,
}

/// `E_Q[log mix(lambda, pair)]`, `-inf` if a positive-probability atom is
/// ruined.
pub fn ell(dist: &FiniteDistribution, lambda: Bet) -> f64 {
    dist.objective().value(lambda.value())
}

/// Maximizes `ell` over `[0, 1]`.
pub fn solve(dist: &FiniteDistribution) -> Result<OracleSolution> {
    let obj = dist.objective();
    if obj.value(0.5) == f64::NEG_INFINITY {
        // mix is affine, so -inf at an interior point means a (0, 0) atom
        return Err(Error::DegenerateDistribution);
    }
    let lambda_star = Bet::clamped(obj.argmax_golden());
    Ok(OracleSolution {
        lambda_star,
        gamma_star: dist.problem.map(|p| p.lambda_to_gamma(lambda_star)),
        ell_star: ell(dist, lambda_star),
    })
}

/// `E_Q[mix(lambda, pair) / mix(lambda_star, pair)]`.
///
/// `+inf` if `lambda_star` ruins an atom that `lambda` does not.
pub fn numeraire_check(dist: &FiniteDistribution, lambda: Bet, lambda_star: Bet) -> f64 {
    let mut total = 0.0;
    for a in &dist.atoms {
        let num = mix(lambda, a.pair);
        let den = mix(lambda_star, a.pair);
        if den == 0.0 {
            if num > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        total += a.prob * num / den;
    }
    total
}

/// `log(1/alpha) / ell`: the small-alpha benchmark for `E[tau]`.
pub fn rejection_time_bound(alpha: f64, ell: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(ell > 0.0) {
        return Err(Error::NonPositiveGrowth(ell));
    }
    Ok((1.0 / alpha).ln() / ell)
}

/// Conservative `(growth lower bound, E[tau] / log(1/alpha) upper bound)`
/// for a mean shift `delta`, optionally sharpened by the variance.
pub fn conservative_bounds(delta: f64, sigma_sq: Option<f64>) -> Result<(f64, f64)> {
    if !(delta.abs() <= 1.0) {
        return Err(Error::InvalidDelta {
            delta,
            reason: "|delta| must be at most 1".to_string(),
        });
    }
    if let Some(s2) = sigma_sq {
        if !(0.0..=0.25).contains(&s2) {
            return Err(Error::InvalidDistribution(format!(
                "variance {s2} is outside [0, 1/4]"
            )));
        }
        let edge = 0.5 * (1.0 - (1.0 - 4.0 * s2).sqrt());
        if delta.abs() > edge + 1e-12 {
            return Err(Error::InvalidDelta {
                delta,
                reason: format!("needs |delta| <= {edge} for variance {s2}"),
            });
        }
    }
    if delta == 0.0 {
        return Ok((0.0, f64::INFINITY));
    }
    let d2 = delta * delta;
    Ok(match sigma_sq {
        None => (d2 / (1.0 + 4.0 * d2), 4.0 + 1.0 / d2),
        Some(s2) => (d2 / (4.0 * (s2 + d2)), 4.0 + 4.0 * s2 / d2),
    })
}
