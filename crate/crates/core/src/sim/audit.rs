//! Pathwise audit of the universal portfolio's regret against
//! `log(n + 1) / 2 + log 2`.
//!
//! Sequences mix random, heavy-tailed and adaptive generators; e-values
//! range over `{0} U [1e-6, 1e8]` and a pair is never `(0, 0)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eprocess::{co96_bound, regret_from};
use crate::error::{Error, Result};
use crate::sim::rng::stream;
use crate::strategies::UpState;
use crate::wealth::{Bet, EValuePair, HindsightTracker, LogWealthLedger, Retention};

pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Both e-values uniform on `[0, 3]`.
    Uniform,
    /// Log-uniform on `[1e-6, 1e8]`, one side zeroed 10% of the time.
    HeavyTailed,
    /// Two-sided bounded-mean pairs from Bernoulli data.
    Binary,
    /// Runs of one dominant asset with geometric lengths.
    Bursty,
    /// Pays whichever asset the current bet underweights.
    Adversarial,
    /// `(0, 2), (2, 0), ...`
    Alternating,
    /// `(1, 1)` forever.
    Constant,
}

impl Generator {
    pub const RANDOM: [Generator; 5] = [
        Self::Uniform,
        Self::HeavyTailed,
        Self::Binary,
        Self::Bursty,
        Self::Adversarial,
    ];
}

fn log_uniform<R: Rng>(rng: &mut R) -> f64 {
    10f64.powf(rng.gen_range(-6.0..=8.0))
}

struct Source<R> {
    kind: Generator,
    rng: R,
    n: u64,
    mu0: f64,
    q: f64,
    favored: bool,
    stay: f64,
}

impl<R: Rng> Source<R> {
    fn new(kind: Generator, mut rng: R) -> Self {
        let mu0 = rng.gen_range(0.05..0.95);
        let q = rng.gen_range(0.0..1.0);
        let stay = rng.gen_range(0.9..0.999);
        Self {
            kind,
            rng,
            n: 0,
            mu0,
            q,
            favored: false,
            stay,
        }
    }

    fn next(&mut self, bet: Bet) -> EValuePair {
        self.n += 1;
        let (e1, e2) = match self.kind {
            Generator::Uniform => loop {
                let (a, b) = (self.rng.gen_range(0.0..=3.0), self.rng.gen_range(0.0..=3.0));
                if a > 0.0 || b > 0.0 {
                    break (a, b);
                }
            },
            Generator::HeavyTailed => {
                let (mut a, mut b) = (log_uniform(&mut self.rng), log_uniform(&mut self.rng));
                if self.rng.gen_bool(0.1) {
                    if self.rng.gen_bool(0.5) {
                        a = 0.0;
                    } else {
                        b = 0.0;
                    }
                }
                (a, b)
            }
            Generator::Binary => {
                if self.rng.gen_bool(self.q) {
                    (0.0, 1.0 / self.mu0)
                } else {
                    (1.0 / (1.0 - self.mu0), 0.0)
                }
            }
            Generator::Bursty => {
                if !self.rng.gen_bool(self.stay) {
                    self.favored = !self.favored;
                }
                let big = log_uniform(&mut self.rng).max(1.0);
                let small = if self.rng.gen_bool(0.2) {
                    0.0
                } else {
                    10f64.powf(self.rng.gen_range(-6.0..=0.0))
                };
                if self.favored {
                    (small, big)
                } else {
                    (big, small)
                }
            }
            Generator::Adversarial => {
                let scale = if self.rng.gen_bool(0.5) { 2.0 } else { log_uniform(&mut self.rng) };
                if bet.value() > 0.5 {
                    (scale, 0.0)
                } else {
                    (0.0, scale)
                }
            }
            Generator::Alternating => {
                if self.n % 2 == 1 {
                    (0.0, 2.0)
                } else {
                    (2.0, 0.0)
                }
            }
            Generator::Constant => (1.0, 1.0),
        };
        EValuePair::new(e1, e2).expect("generators emit valid pairs")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceAudit {
    pub index: u64,
    pub generator: Generator,
    pub length: u64,
    pub violations: u64,
    pub first_violation: Option<u64>,
    /// `max_n (R_n - co96_bound(n))`; negative when the bound holds strictly.
    pub max_excess: f64,
    pub final_regret: f64,
    pub final_bound: f64,
}

/// Runs `length` rounds of UP against one generator, checking the regret
/// bound after every round.
pub fn audit_sequence(index: u64, generator: Generator, length: u64, seed: u64) -> SequenceAudit {
    let mut source = Source::new(generator, stream(seed, index));
    let mut up = UpState::default();
    let mut ledger = LogWealthLedger::with_retention(Retention::Streaming);
    let mut best = HindsightTracker::new();
    let mut out = SequenceAudit {
        index,
        generator,
        length,
        violations: 0,
        first_violation: None,
        max_excess: f64::NEG_INFINITY,
        final_regret: 0.0,
        final_bound: co96_bound(0),
    };
    for n in 1..=length {
        let pair = source.next(up.bet());
        ledger.record(up.bet(), pair);
        up.update(pair);
        let h = best.observe(pair);
        let r = regret_from(h.log_wealth, ledger.log_wealth());
        let bound = co96_bound(n);
        let excess = r - bound;
        if !(excess <= AUDIT_TOLERANCE) {
            out.violations += 1;
            out.first_violation.get_or_insert(n);
        }
        if excess > out.max_excess || excess.is_nan() {
            out.max_excess = excess;
        }
        out.final_regret = r;
        out.final_bound = bound;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub sequences: u64,
    pub length: u64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            sequences: 100,
            length: 5000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub tolerance: f64,
    pub steps: u64,
    pub violations: u64,
    pub max_excess: f64,
    pub worst: Option<SequenceAudit>,
    pub sequences: Vec<SequenceAudit>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Audits `config.sequences` random sequences, cycling through
/// [`Generator::RANDOM`].
pub fn run_regret_audit(config: &AuditConfig) -> Result<AuditReport> {
    if config.sequences == 0 || config.length == 0 {
        return Err(Error::Config("audit needs at least one sequence of positive length".to_string()));
    }
    let sequences: Vec<SequenceAudit> = (0..config.sequences)
        .map(|i| {
            let g = Generator::RANDOM[(i % Generator::RANDOM.len() as u64) as usize];
            audit_sequence(i, g, config.length, config.seed)
        })
        .collect();
    let worst = sequences
        .iter()
        .max_by(|a, b| a.max_excess.total_cmp(&b.max_excess))
        .cloned();
    Ok(AuditReport {
        config: config.clone(),
        tolerance: AUDIT_TOLERANCE,
        steps: config.sequences * config.length,
        violations: sequences.iter().map(|s| s.violations).sum(),
        max_excess: worst.as_ref().map_or(f64::NEG_INFINITY, |w| w.max_excess),
        worst,
        sequences,
    })
}
