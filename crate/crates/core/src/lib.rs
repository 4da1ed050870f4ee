//! Sequential testing by betting.
//!
//! Nonnegative e-value pairs are combined into wealth processes
//! `W_n = prod ((1 - lambda_i) e1_i + lambda_i e2_i)`, which are test
//! supermartingales under the null whenever the bets are predictable.
//! This crate provides the wealth ledger, betting strategies (universal
//! portfolio, ONS, follow-the-leader, constants), regret-subtracted
//! e-processes, the log-optimal oracle, the bounded-mean and
//! difference-in-means problems, and a seeded Monte Carlo harness.

pub mod eprocess;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod problems;
pub mod sim;
pub mod strategies;
pub mod wealth;

pub use error::{Error, Result};
pub use eprocess::{co96_bound, oj23_bound, regret, EProcessKind, RegretProcess, SequentialTest, StoppingTime};
pub use problems::{Observation, ProblemKind, ProblemSpec, Sample};
pub use strategies::{AnyStrategy, Strategy, StrategySpec, UpState};
pub use wealth::{log_mix, mix, Bet, EValuePair, Hindsight, LogWealthLedger, Retention};
