//! Portfolio regret, regret-subtracted e-processes and level-alpha
//! sequential tests.
//!
//! Given the best constant portfolio in hindsight `lambda_max` with
//! log-wealth `S_n`, two e-processes are formed by subtracting a regret
//! bound that the universal portfolio is known to satisfy:
//!
//! * CO96: `S_n - (log(n + 1) / 2 + log 2)`,
//! * OJ23: `S_n - max_j log(pi l^j (1-l)^(n-j) Gamma(n+1) / (Gamma(j+1/2) Gamma(n-j+1/2)))`
//!   with `l = lambda_max`.
//!
//! Both are dominated by the universal-portfolio wealth on every path, and
//! `CO96 <= OJ23 <= UP` holds at every step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wealth::{Bet, EValuePair, HindsightTracker, LogWealthLedger};

/// `log(n + 1) / 2 + log 2`, using the `n = 2` value for `n < 2`.
pub fn co96_bound(n: u64) -> f64 {
    let n = n.max(2) as f64;
    0.5 * (n + 1.0).ln() + std::f64::consts::LN_2
}

fn oj23_term(n: u64, j: u64, log_l: f64, log_1ml: f64) -> f64 {
    let (nf, jf) = (n as f64, j as f64);
    let a = if j == 0 { 0.0 } else { jf * log_l };
    let b = if j == n { 0.0 } else { (nf - jf) * log_1ml };
    std::f64::consts::PI.ln() + a + b + libm::lgamma(nf + 1.0)
        - libm::lgamma(jf + 0.5)
        - libm::lgamma(nf - jf + 0.5)
}

/// Orabona-Jun regret bound at `lambda_max`; zero for `n = 0`.
///
/// The log term is concave in `j`, with its forward difference changing
/// sign at `j = lambda n - 1/2`, so only the two integers around that point
/// are evaluated.
pub fn oj23_bound(n: u64, lambda_max: Bet) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let l = lambda_max.value();
    let (log_l, log_1ml) = (l.ln(), (1.0 - l).ln());
    if l == 0.0 {
        return oj23_term(n, 0, log_l, log_1ml);
    }
    if l == 1.0 {
        return oj23_term(n, n, log_l, log_1ml);
    }
    let center = (l * n as f64 - 0.5).ceil().clamp(0.0, n as f64) as u64;
    let lo = center.saturating_sub(1);
    let hi = (center + 1).min(n);
    (lo..=hi)
        .map(|j| oj23_term(n, j, log_l, log_1ml))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_lambda sum log mix(lambda, pair_i) - log W_n`.
///
/// Zero when both sides are `-inf`.
pub fn regret(ledger: &LogWealthLedger) -> Result<f64> {
    let best = ledger.best_hindsight()?;
    Ok(regret_from(best.log_wealth, ledger.log_wealth()))
}

pub(crate) fn regret_from(best: f64, achieved: f64) -> f64 {
    if best == f64::NEG_INFINITY && achieved == f64::NEG_INFINITY {
        0.0
    } else {
        best - achieved
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretBoundKind {
    Co96,
    Oj23,
}

impl RegretBoundKind {
    pub fn bound(&self, n: u64, lambda_max: Bet) -> f64 {
        match self {
            Self::Co96 => co96_bound(n),
            Self::Oj23 => oj23_bound(n, lambda_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EProcessKind {
    Up,
    Co96,
    Oj23,
}

/// Log e-process value computed from a ledger.
///
/// For `Up` the ledger must hold the universal-portfolio wealth; the regret
/// kinds only use the ledger's pair history.
pub fn eprocess_value(kind: EProcessKind, ledger: &LogWealthLedger) -> Result<f64> {
    match kind {
        EProcessKind::Up => Ok(ledger.log_wealth()),
        EProcessKind::Co96 | EProcessKind::Oj23 => {
            let best = ledger.best_hindsight()?;
            let bound = match kind {
                EProcessKind::Co96 => RegretBoundKind::Co96,
                _ => RegretBoundKind::Oj23,
            };
            Ok(best.log_wealth - bound.bound(ledger.n(), best.bet))
        }
    }
}

/// Streaming regret-subtracted e-process.
#[derive(Debug, Clone)]
pub struct RegretProcess {
    kind: RegretBoundKind,
    tracker: HindsightTracker,
}

impl RegretProcess {
    pub fn new(kind: RegretBoundKind) -> Self {
        Self {
            kind,
            tracker: HindsightTracker::new(),
        }
    }

    pub fn kind(&self) -> RegretBoundKind {
        self.kind
    }

    /// Current log value.
    pub fn log_value(&self) -> f64 {
        let h = self.tracker.current();
        h.log_wealth - self.kind.bound(self.tracker.n(), h.bet)
    }

    pub fn observe(&mut self, pair: EValuePair) -> f64 {
        self.tracker.observe(pair);
        self.log_value()
    }

    pub fn tracker(&self) -> &HindsightTracker {
        &self.tracker
    }
}

/// Result of running a sequential test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingTime {
    Running,
    Rejected(u64),
    Censored(u64),
}

impl StoppingTime {
    pub fn rejected(&self) -> Option<u64> {
        match self {
            Self::Rejected(t) => Some(*t),
            _ => None,
        }
    }
}

/// Level-alpha test `reject once log E_n >= log(1/alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialTest {
    alpha: f64,
    log_threshold: f64,
    horizon: u64,
    n: u64,
    last_log_value: f64,
    state: StoppingTime,
}

impl SequentialTest {
    pub fn new(alpha: f64, horizon: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".to_string()));
        }
        Ok(Self {
            alpha,
            log_threshold: (1.0 / alpha).ln(),
            horizon,
            n: 0,
            last_log_value: 0.0,
            state: StoppingTime::Running,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_threshold(&self) -> f64 {
        self.log_threshold
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn last_log_value(&self) -> f64 {
        self.last_log_value
    }

    pub fn state(&self) -> StoppingTime {
        self.state
    }

    pub fn is_done(&self) -> bool {
        self.state != StoppingTime::Running
    }

    /// Feeds the log e-process value at the next time step. Ignored once
    /// the test has rejected or been censored.
    pub fn step(&mut self, log_value: f64) -> StoppingTime {
        if self.is_done() {
            return self.state;
        }
        self.n += 1;
        self.last_log_value = log_value;
        if log_value >= self.log_threshold {
            self.state = StoppingTime::Rejected(self.n);
        } else if self.n >= self.horizon {
            self.state = StoppingTime::Censored(self.horizon);
        }
        self.state
    }
}

/// Functional form of [`SequentialTest::step`].
pub fn step_test(mut test: SequentialTest, log_value: f64) -> SequentialTest {
    test.step(log_value);
    test
}
