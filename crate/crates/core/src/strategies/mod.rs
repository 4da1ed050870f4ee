//! Predictable betting strategies.
//!
//! Every strategy exposes the bet for the *next* round and is then shown
//! that round's observation, so a bet can only depend on strictly earlier
//! data.

mod ftl;
mod ons;
mod up;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{Observation, ProblemSpec};
use crate::wealth::Bet;

pub use ftl::FtlState;
pub use ons::{ons_step_size, OnsState};
pub use up::{UpState, DEFAULT_UP_NODES};

pub trait Strategy {
    /// Bet for the upcoming round.
    fn bet(&self) -> Bet;

    /// Reveal the round's observation.
    fn update(&mut self, obs: &Observation) -> Result<()>;
}

/// Constant rebalanced portfolio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantStrategy(Bet);

impl ConstantStrategy {
    pub fn new(lambda: f64) -> Result<Self> {
        Bet::new(lambda).map(Self)
    }
}

impl From<Bet> for ConstantStrategy {
    fn from(b: Bet) -> Self {
        Self(b)
    }
}

impl Strategy for ConstantStrategy {
    fn bet(&self) -> Bet {
        self.0
    }

    fn update(&mut self, _obs: &Observation) -> Result<()> {
        Ok(())
    }
}

/// Named processes accepted in configs and on the command line.
///
/// `co96` and `oj23` are not betting strategies: they are the running
/// best-in-hindsight log-wealth minus a regret bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategySpec {
    Up,
    Ons,
    Ftl,
    Constant(Bet),
    Oracle,
    Co96,
    Oj23,
}

impl StrategySpec {
    /// Builds the betting state. `oracle_bet` resolves `oracle`; the regret
    /// processes have no betting state and return `None`.
    pub fn build(&self, problem: &ProblemSpec, oracle_bet: Option<Bet>) -> Result<Option<AnyStrategy>> {
        Ok(Some(match self {
            Self::Up => AnyStrategy::Up(Box::default()),
            Self::Ons => AnyStrategy::Ons(OnsState::for_problem(problem)?),
            Self::Ftl => AnyStrategy::Ftl(FtlState::default()),
            Self::Constant(b) => AnyStrategy::Constant(ConstantStrategy(*b)),
            Self::Oracle => {
                let b = oracle_bet.ok_or_else(|| {
                    Error::Config("oracle strategy needs a solvable alternative".to_string())
                })?;
                AnyStrategy::Constant(ConstantStrategy(b))
            }
            Self::Co96 | Self::Oj23 => return Ok(None),
        }))
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Up => f.write_str("up"),
            Self::Ons => f.write_str("ons"),
            Self::Ftl => f.write_str("ftl"),
            Self::Constant(b) => write!(f, "const:{}", b.value()),
            Self::Oracle => f.write_str("oracle"),
            Self::Co96 => f.write_str("co96"),
            Self::Oj23 => f.write_str("oj23"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "up" => Self::Up,
            "ons" => Self::Ons,
            "ftl" => Self::Ftl,
            "oracle" => Self::Oracle,
            "co96" => Self::Co96,
            "oj23" => Self::Oj23,
            _ => {
                let arg = s
                    .strip_prefix("const:")
                    .ok_or_else(|| Error::UnknownStrategy(s.to_string()))?;
                let lambda: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownStrategy(s.to_string()))?;
                Self::Constant(Bet::new(lambda)?)
            }
        })
    }
}

impl TryFrom<String> for StrategySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StrategySpec> for String {
    fn from(s: StrategySpec) -> String {
        s.to_string()
    }
}

/// Static dispatch over the built-in strategies.
#[derive(Debug, Clone)]
pub enum AnyStrategy {
    Constant(ConstantStrategy),
    Up(Box<UpState>),
    Ons(OnsState),
    Ftl(FtlState),
}

impl Strategy for AnyStrategy {
    fn bet(&self) -> Bet {
        match self {
            Self::Constant(s) => s.bet(),
            Self::Up(s) => s.bet(),
            Self::Ons(s) => s.bet(),
            Self::Ftl(s) => s.bet(),
        }
    }

    fn update(&mut self, obs: &Observation) -> Result<()> {
        match self {
            Self::Constant(s) => Strategy::update(s, obs),
            Self::Up(s) => Strategy::update(s.as_mut(), obs),
            Self::Ons(s) => Strategy::update(s, obs),
            Self::Ftl(s) => Strategy::update(s, obs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::two_sided_pair;
    use crate::wealth::{mix, EValuePair};
    use proptest::prelude::{prop, prop_assert_eq, proptest};

    #[test]
    fn parse_names() {
        assert_eq!("up".parse::<StrategySpec>().unwrap(), StrategySpec::Up);
        assert_eq!(" oj23 ".parse::<StrategySpec>().unwrap(), StrategySpec::Oj23);
        assert_eq!(
            "const:0.4".parse::<StrategySpec>().unwrap(),
            StrategySpec::Constant(Bet::new(0.4).unwrap())
        );
        assert_eq!(StrategySpec::Constant(Bet::new(0.25).unwrap()).to_string(), "const:0.25");
        for bad in ["", "UP", "const:", "const:1.5", "const:-0.1", "const:abc", "kelly"] {
            assert!(bad.parse::<StrategySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn constant_examples() {
        let s = ConstantStrategy::new(0.4).unwrap();
        assert_eq!(s.bet().value(), 0.4);
        assert!(ConstantStrategy::new(1.2).is_err());
        let zero = ConstantStrategy::new(0.0).unwrap();
        assert_eq!(mix(zero.bet(), EValuePair::new(0.0, 2.0).unwrap()), 0.0);
    }

    #[test]
    fn oracle_needs_a_bet() {
        let p = ProblemSpec::bounded_two_sided(0.3).unwrap();
        assert!(StrategySpec::Oracle.build(&p, None).is_err());
        let s = StrategySpec::Oracle.build(&p, Some(Bet::new(0.4).unwrap())).unwrap().unwrap();
        assert_eq!(s.bet().value(), 0.4);
        assert!(StrategySpec::Co96.build(&p, None).unwrap().is_none());
    }

    fn all_strategies(problem: &ProblemSpec) -> Vec<AnyStrategy> {
        ["up", "ons", "ftl", "const:0.3"]
            .iter()
            .map(|n| n.parse::<StrategySpec>().unwrap().build(problem, None).unwrap().unwrap())
            .collect()
    }

    proptest! {
        /// Replaying any prefix reproduces the bets emitted along the full run.
        #[test]
        fn bets_are_predictable(xs in prop::collection::vec(0.0f64..=1.0, 1..80), cut in 0usize..80) {
            let problem = ProblemSpec::bounded_two_sided(0.4).unwrap();
            let obs: Vec<Observation> = xs
                .iter()
                .map(|&x| Observation { x, pair: two_sided_pair(x, 0.4).unwrap() })
                .collect();
            let cut = cut.min(obs.len());
            let mut full = all_strategies(&problem);
            let mut emitted = vec![Vec::new(); full.len()];
            for o in &obs {
                for (s, e) in full.iter_mut().zip(emitted.iter_mut()) {
                    e.push(s.bet());
                    s.update(o).unwrap();
                }
            }
            let mut prefix = all_strategies(&problem);
            for o in &obs[..cut] {
                for s in prefix.iter_mut() {
                    s.update(o).unwrap();
                }
            }
            for (s, e) in prefix.iter().zip(&emitted) {
                if cut < obs.len() {
                    prop_assert_eq!(s.bet(), e[cut]);
                }
            }
        }
    }
}
