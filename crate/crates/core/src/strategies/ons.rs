//! Online Newton Step in the `gamma` parameterization of
//! `prod (1 + gamma_i (x_i - mu0))`, clamped to `[-1/2, 1/2]`.

use crate::error::{Error, Result};
use crate::problems::{Observation, ProblemKind, ProblemSpec};
use crate::wealth::Bet;

use super::Strategy;

/// Step size `2 / (2 - log 3)`.
pub fn ons_step_size() -> f64 {
    2.0 / (2.0 - 3f64.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnsState {
    gamma: f64,
    sum_sq: f64,
    last_z: f64,
    mu0: f64,
    lo: f64,
    hi: f64,
    one_sided: bool,
}

impl OnsState {
    /// Two-sided ONS around `mu0`, with `gamma_1 = 0`.
    pub fn new(mu0: f64) -> Result<Self> {
        Self::for_problem(&ProblemSpec::bounded_two_sided(mu0)?)
    }

    /// ONS for a problem; one-sided problems additionally clamp at `gamma >= 0`.
    pub fn for_problem(problem: &ProblemSpec) -> Result<Self> {
        let (lo, hi) = problem.gamma_range();
        let one_sided = problem.kind() == ProblemKind::BoundedOneSided;
        Ok(Self {
            gamma: 0.0,
            sum_sq: 0.0,
            last_z: 0.0,
            mu0: problem.mu0(),
            lo: lo.max(-0.5),
            hi: hi.min(0.5),
            one_sided,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn last_z(&self) -> f64 {
        self.last_z
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// The bet on the pair scale.
    pub fn bet(&self) -> Bet {
        let mu0 = self.mu0;
        if self.one_sided {
            Bet::clamped(self.gamma * mu0)
        } else {
            Bet::clamped(mu0 + self.gamma * mu0 * (1.0 - mu0))
        }
    }

    /// Folds in `x` using the gamma that was in force when it arrived.
    pub fn update(&mut self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ObservationOutOfRange { value: x });
        }
        let centered = x - self.mu0;
        let z = -centered / (1.0 + self.gamma * centered);
        self.last_z = z;
        self.sum_sq += z * z;
        let next = self.gamma - ons_step_size() * z / (1.0 + self.sum_sq);
        self.gamma = next.clamp(self.lo, self.hi);
        Ok(())
    }
}

impl Strategy for OnsState {
    fn bet(&self) -> Bet {
        OnsState::bet(self)
    }

    fn update(&mut self, obs: &Observation) -> Result<()> {
        OnsState::update(self, obs.x)
    }
}
