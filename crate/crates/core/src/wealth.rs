//! E-value pairs, bets and log-domain wealth accounting.
//!
//! A two-asset portfolio multiplies its wealth each round by
//! `(1 - lambda) * e1 + lambda * e2`. All wealth is tracked as a log, with
//! ruin (wealth exactly zero) represented as `-inf`, which is absorbing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, CompensatedSum};

/// Bracket width at which golden-section search stops.
pub const HINDSIGHT_TOL: f64 = 1e-12;
/// Iteration cap for golden-section search.
pub const HINDSIGHT_MAX_ITER: usize = 200;

/// One observation mapped to the two e-values `(E^(1), E^(2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct EValuePair {
    e1: f64,
    e2: f64,
}

impl EValuePair {
    /// Both components equal to one: the wealth-neutral observation.
    pub const NEUTRAL: EValuePair = EValuePair { e1: 1.0, e2: 1.0 };

    pub fn new(e1: f64, e2: f64) -> Result<Self> {
        if !(e1.is_finite() && e2.is_finite() && e1 >= 0.0 && e2 >= 0.0) {
            return Err(Error::InvalidPair { e1, e2 });
        }
        // normalize -0.0 so equal pairs hash equally
        Ok(Self {
            e1: e1 + 0.0,
            e2: e2 + 0.0,
        })
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    /// True when no bet can keep wealth positive on this observation.
    pub fn is_ruinous(&self) -> bool {
        self.e1 == 0.0 && self.e2 == 0.0
    }

    fn key(&self) -> (u64, u64) {
        (self.e1.to_bits(), self.e2.to_bits())
    }
}

impl TryFrom<(f64, f64)> for EValuePair {
    type Error = Error;

    fn try_from((e1, e2): (f64, f64)) -> Result<Self> {
        Self::new(e1, e2)
    }
}

impl From<EValuePair> for (f64, f64) {
    fn from(p: EValuePair) -> Self {
        (p.e1, p.e2)
    }
}

/// Fraction of wealth placed on the second asset, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bet(f64);

impl Bet {
    pub const ZERO: Bet = Bet(0.0);
    pub const HALF: Bet = Bet(0.5);
    pub const ONE: Bet = Bet(1.0);

    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Bet(lambda + 0.0))
        } else {
            Err(Error::InvalidBet(lambda))
        }
    }

    /// Clamps into `[0, 1]`; NaN maps to one half.
    pub fn clamped(lambda: f64) -> Self {
        if lambda.is_nan() {
            Bet::HALF
        } else {
            Bet(lambda.clamp(0.0, 1.0))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Bet {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Bet> for f64 {
    fn from(b: Bet) -> f64 {
        b.0
    }
}

/// Per-round wealth multiplier `(1 - lambda) * e1 + lambda * e2`.
pub fn mix(bet: Bet, pair: EValuePair) -> f64 {
    let l = bet.0;
    (1.0 - l) * pair.e1 + l * pair.e2
}

/// `log(mix(bet, pair))` with `log 0 = -inf`.
pub fn log_mix(bet: Bet, pair: EValuePair) -> f64 {
    safe_ln(mix(bet, pair))
}

pub(crate) fn safe_ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Best constant-rebalanced portfolio on a fixed set of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hindsight {
    pub bet: Bet,
    pub log_wealth: f64,
}

/// The concave objective `lambda -> sum_i w_i log mix(lambda, pair_i)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogMixObjective<'a> {
    terms: &'a [(EValuePair, f64)],
}

impl<'a> LogMixObjective<'a> {
    pub(crate) fn new(terms: &'a [(EValuePair, f64)]) -> Self {
        Self { terms }
    }

    fn active(&self) -> impl Iterator<Item = &(EValuePair, f64)> + '_ {
        self.terms.iter().filter(|(_, w)| *w > 0.0)
    }

    pub(crate) fn value(&self, lambda: f64) -> f64 {
        let bet = Bet(lambda);
        let mut total = 0.0;
        for (pair, w) in self.active() {
            let m = mix(bet, *pair);
            if m <= 0.0 {
                return f64::NEG_INFINITY;
            }
            total += w * m.ln();
        }
        total
    }

    /// Terms that actually depend on lambda.
    fn sloped(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.active()
            .filter(|(p, _)| p.e1 != p.e2)
            .map(|(p, w)| (p.e1, p.e2 - p.e1, *w))
    }

    pub(crate) fn is_flat(&self) -> bool {
        self.sloped().next().is_none()
    }

    /// First derivative at an endpoint, allowing infinities.
    fn endpoint_slope(&self, at_one: bool) -> f64 {
        let mut g = 0.0;
        for (a, b, w) in self.sloped() {
            let m = if at_one { a + b } else { a };
            if m == 0.0 {
                return if b > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
            }
            g += w * b / m;
        }
        g
    }

    fn slope_and_curvature(&self, lambda: f64) -> (f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        for (a, b, w) in self.sloped() {
            let r = b / (a + lambda * b);
            g += w * r;
            h -= w * r * r;
        }
        (g, h)
    }

    /// Safeguarded Newton on the derivative, started from `warm`.
    ///
    /// Returns 0.5 for a flat objective. Pairs that ruin every bet are
    /// constant `-inf` offsets and do not affect the maximizer.
    pub(crate) fn argmax_from(&self, warm: f64) -> f64 {
        if self.is_flat() {
            return 0.5;
        }
        if self.endpoint_slope(false) <= 0.0 {
            return 0.0;
        }
        if self.endpoint_slope(true) >= 0.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut x = if warm > 0.0 && warm < 1.0 { warm } else { 0.5 };
        for _ in 0..200 {
            let (g, h) = self.slope_and_curvature(x);
            if g == 0.0 {
                return x;
            }
            if g > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - g / h;
            let next = if newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let done = (next - x).abs() <= 1e-16 * x.max(1e-3) || hi - lo <= f64::EPSILON * hi;
            x = next;
            if done {
                break;
            }
        }
        x
    }

    /// Golden-section maximization with endpoint comparison, polished by
    /// Newton on the derivative.
    pub(crate) fn argmax_golden(&self) -> f64 {
        if self.is_flat() {
            return 0.5;
        }
        let (x, fx) = golden_section_max(
            |l| self.value(l),
            0.0,
            1.0,
            HINDSIGHT_TOL,
            HINDSIGHT_MAX_ITER,
        );
        let mut best = (x, fx);
        for end in [0.0, 1.0] {
            let v = self.value(end);
            if v > best.1 {
                best = (end, v);
            }
        }
        self.argmax_from(best.0)
    }
}

/// Multiset of observed pairs, stored as distinct pairs with counts.
///
/// Lossless: any function of the form `sum_i f(pair_i)` is recoverable.
#[derive(Debug, Clone, Default)]
pub struct PairHistory {
    entries: Vec<(EValuePair, f64)>,
    index: HashMap<(u64, u64), usize>,
    len: u64,
}

impl PairHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pair: EValuePair) {
        self.len += 1;
        match self.index.get(&pair.key()) {
            Some(&i) => self.entries[i].1 += 1.0,
            None => {
                self.index.insert(pair.key(), self.entries.len());
                self.entries.push((pair, 1.0));
            }
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Distinct pairs with their multiplicities.
    pub fn distinct(&self) -> &[(EValuePair, f64)] {
        &self.entries
    }

    /// `sum_i log mix(bet, pair_i)`.
    pub fn log_wealth_at(&self, bet: Bet) -> f64 {
        LogMixObjective::new(&self.entries).value(bet.value())
    }

    /// Best constant bet by golden-section search.
    pub fn best_hindsight(&self) -> Hindsight {
        let obj = LogMixObjective::new(&self.entries);
        let lambda = obj.argmax_golden();
        Hindsight {
            bet: Bet::clamped(lambda),
            log_wealth: obj.value(lambda),
        }
    }

    /// Best constant bet by warm-started Newton.
    pub fn best_hindsight_from(&self, warm: Bet) -> Hindsight {
        let obj = LogMixObjective::new(&self.entries);
        let lambda = obj.argmax_from(warm.value());
        Hindsight {
            bet: Bet::clamped(lambda),
            log_wealth: obj.value(lambda),
        }
    }
}

/// Streams pairs and keeps the best constant bet current, warm-starting
/// each search from the previous maximizer.
#[derive(Debug, Clone)]
pub struct HindsightTracker {
    history: PairHistory,
    current: Hindsight,
}

impl Default for HindsightTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl HindsightTracker {
    pub fn new() -> Self {
        Self {
            history: PairHistory::new(),
            current: Hindsight {
                bet: Bet::HALF,
                log_wealth: 0.0,
            },
        }
    }

    pub fn observe(&mut self, pair: EValuePair) -> Hindsight {
        self.history.push(pair);
        self.current = self.history.best_hindsight_from(self.current.bet);
        self.current
    }

    pub fn current(&self) -> Hindsight {
        self.current
    }

    pub fn n(&self) -> u64 {
        self.history.len()
    }

    pub fn history(&self) -> &PairHistory {
        &self.history
    }
}

/// How much of the pair stream a ledger keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Retention {
    #[default]
    Full,
    Streaming,
}

/// Log-domain wealth `log W_n` of a portfolio process.
#[derive(Debug, Clone)]
pub struct LogWealthLedger {
    n: u64,
    log_wealth: CompensatedSum,
    history: Option<PairHistory>,
}

impl Default for LogWealthLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl LogWealthLedger {
    /// Fresh ledger at wealth one, retaining the full history.
    pub fn new() -> Self {
        Self::with_retention(Retention::Full)
    }

    pub fn with_retention(retention: Retention) -> Self {
        Self {
            n: 0,
            log_wealth: CompensatedSum::new(),
            history: match retention {
                Retention::Full => Some(PairHistory::new()),
                Retention::Streaming => None,
            },
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn log_wealth(&self) -> f64 {
        self.log_wealth.value()
    }

    pub fn is_ruined(&self) -> bool {
        self.log_wealth() == f64::NEG_INFINITY
    }

    pub fn history(&self) -> Option<&PairHistory> {
        self.history.as_ref()
    }

    /// Applies one round in place.
    pub fn record(&mut self, bet: Bet, pair: EValuePair) {
        self.n += 1;
        self.log_wealth.add(log_mix(bet, pair));
        if let Some(h) = self.history.as_mut() {
            h.push(pair);
        }
    }

    /// Returns the ledger advanced by one round.
    pub fn updated(mut self, bet: Bet, pair: EValuePair) -> Self {
        self.record(bet, pair);
        self
    }

    /// Best constant-rebalanced portfolio in hindsight and its log-wealth.
    pub fn best_hindsight(&self) -> Result<Hindsight> {
        self.history
            .as_ref()
            .map(PairHistory::best_hindsight)
            .ok_or(Error::HistoryNotRetained)
    }
}
