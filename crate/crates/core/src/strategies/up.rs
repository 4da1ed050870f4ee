//! Cover's universal portfolio under a Beta(1/2, 1/2) prior.
//!
//! The mixture `int lambda W_{n-1}(lambda) dF / int W_{n-1}(lambda) dF` is
//! evaluated by Gauss-Chebyshev quadrature: for the arcsine weight the
//! Gauss-Jacobi(-1/2, -1/2) rule has nodes `sin^2(theta_k / 2)` with
//! `theta_k = (2k + 1) pi / (2K)` and equal weights `1/K`, and integrates
//! polynomials of degree `< 2K` exactly.
//!
//! Node wealths are stored as logs. Bets are computed from a linear-domain
//! copy `w_k exp(L_k - shift)` that is multiplied forward each round and
//! rebuilt from the logs whenever it could have lost precision.

use crate::numeric::log_sum_exp_pairwise;
use crate::problems::Observation;
use crate::wealth::{safe_ln, Bet, EValuePair};

use super::Strategy;

pub const DEFAULT_UP_NODES: usize = 513;

/// Rebuild the linear copy at least this often.
const RESYNC_EVERY: u32 = 256;
/// Rebuild once node wealth ratios may have moved by more than `e^256`.
///
/// With the scale held in `[1e-100, 1e100]`, every node that matters stays
/// far above the subnormal range between rebuilds.
const SPREAD_LIMIT: f64 = 256.0;
const SCALE_LIMIT: f64 = 1e100;
/// Distinct pairs whose per-node multipliers are memoized.
const CACHE_CAPACITY: usize = 16;

#[derive(Debug, Clone)]
struct CachedPair {
    pair: EValuePair,
    mix: Vec<f64>,
    log_mix: Vec<f64>,
    spread: f64,
    pending: u64,
}

/// Universal portfolio state: quadrature nodes and per-node log-wealth.
#[derive(Debug, Clone)]
pub struct UpState {
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
    log_node_wealth: Vec<f64>,
    scaled: Vec<f64>,
    spread: f64,
    since_resync: u32,
    cache: Vec<CachedPair>,
    bet: Bet,
    ruined: bool,
    n: u64,
}

impl Default for UpState {
    fn default() -> Self {
        Self::new(DEFAULT_UP_NODES)
    }
}

impl UpState {
    /// Fresh state with `nodes` quadrature points (at least 2).
    pub fn new(nodes: usize) -> Self {
        let k = nodes.max(2);
        let nodes: Vec<f64> = (0..k)
            .map(|i| {
                let theta = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * k) as f64;
                (0.5 * theta).sin().powi(2)
            })
            .collect();
        let log_weights = vec![-(k as f64).ln(); k];
        let mut state = Self {
            scaled: vec![0.0; k],
            log_node_wealth: vec![0.0; k],
            nodes,
            log_weights,
            spread: 0.0,
            since_resync: 0,
            cache: Vec::new(),
            bet: Bet::HALF,
            ruined: false,
            n: 0,
        };
        state.resync();
        state
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// True once every node wealth is zero.
    pub fn is_ruined(&self) -> bool {
        self.ruined
    }

    /// Per-node `sum_i log mix(lambda_k, pair_i)`.
    pub fn log_node_wealth(&self) -> Vec<f64> {
        let mut out = self.log_node_wealth.clone();
        for c in self.cache.iter().filter(|c| c.pending > 0) {
            let m = c.pending as f64;
            for (o, l) in out.iter_mut().zip(&c.log_mix) {
                *o += m * l;
            }
        }
        out
    }

    /// `log sum_k w_k W_n(lambda_k)`: the mixture wealth.
    pub fn log_mixture_wealth(&self) -> f64 {
        log_sum_exp_pairwise(&self.log_weights, &self.log_node_wealth())
    }

    /// The next bet.
    pub fn bet(&self) -> Bet {
        self.bet
    }

    /// The next bet recomputed from the log node wealths by log-sum-exp.
    pub fn bet_from_logs(&self) -> Bet {
        let logs = self.log_node_wealth();
        let den = log_sum_exp_pairwise(&self.log_weights, &logs);
        if den == f64::NEG_INFINITY {
            return Bet::HALF;
        }
        let log_num_weights: Vec<f64> = self
            .log_weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, l)| w + l.ln())
            .collect();
        let num = log_sum_exp_pairwise(&log_num_weights, &logs);
        Bet::clamped((num - den).exp())
    }

    pub fn update(&mut self, pair: EValuePair) {
        self.n += 1;
        if self.ruined {
            return;
        }
        if pair.is_ruinous() {
            self.ruin();
            return;
        }
        let slot = match self.cache.iter().position(|c| c.pair == pair) {
            Some(i) => Some(i),
            None if self.cache.len() < CACHE_CAPACITY => {
                self.cache.push(self.multipliers(pair));
                Some(self.cache.len() - 1)
            }
            None => None,
        };
        let (num, den) = match slot {
            Some(i) => {
                let c = &mut self.cache[i];
                c.pending += 1;
                self.spread += c.spread;
                advance(&mut self.scaled, &c.mix, &self.nodes)
            }
            None => {
                let c = self.multipliers(pair);
                for (l, d) in self.log_node_wealth.iter_mut().zip(&c.log_mix) {
                    *l += d;
                }
                self.spread += c.spread;
                advance(&mut self.scaled, &c.mix, &self.nodes)
            }
        };
        self.since_resync += 1;
        let needs_resync = self.spread > SPREAD_LIMIT
            || self.since_resync >= RESYNC_EVERY
            || !(den > 1.0 / SCALE_LIMIT && den < SCALE_LIMIT);
        if needs_resync {
            self.resync();
        } else {
            self.bet = Bet::clamped(num / den);
        }
    }

    fn multipliers(&self, pair: EValuePair) -> CachedPair {
        let mix: Vec<f64> = self
            .nodes
            .iter()
            .map(|&l| (1.0 - l) * pair.e1() + l * pair.e2())
            .collect();
        let log_mix: Vec<f64> = mix.iter().map(|&m| safe_ln(m)).collect();
        // mix is monotone in lambda, so the extreme ratio sits at the ends
        let spread = (log_mix[log_mix.len() - 1] - log_mix[0]).abs();
        CachedPair {
            pair,
            mix,
            log_mix,
            spread: if spread.is_nan() { f64::INFINITY } else { spread },
            pending: 0,
        }
    }

    fn flush(&mut self) {
        for c in self.cache.iter_mut().filter(|c| c.pending > 0) {
            let m = c.pending as f64;
            for (o, l) in self.log_node_wealth.iter_mut().zip(&c.log_mix) {
                *o += m * l;
            }
            c.pending = 0;
        }
    }

    fn resync(&mut self) {
        self.flush();
        self.spread = 0.0;
        self.since_resync = 0;
        let shift = self
            .log_node_wealth
            .iter()
            .zip(&self.log_weights)
            .map(|(l, w)| l + w)
            .fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            self.ruin();
            return;
        }
        for ((s, l), w) in self
            .scaled
            .iter_mut()
            .zip(&self.log_node_wealth)
            .zip(&self.log_weights)
        {
            *s = (l + w - shift).exp();
        }
        let (num, den) = weighted_sums(&self.scaled, &self.nodes);
        self.bet = Bet::clamped(num / den);
    }

    fn ruin(&mut self) {
        self.ruined = true;
        self.flush();
        self.log_node_wealth.fill(f64::NEG_INFINITY);
        self.scaled.fill(0.0);
        self.bet = Bet::HALF;
    }
}

/// `scaled *= mix`, returning `(sum lambda_k scaled_k, sum scaled_k)`.
fn advance(scaled: &mut [f64], mix: &[f64], nodes: &[f64]) -> (f64, f64) {
    let mut num = [0.0; 4];
    let mut den = [0.0; 4];
    let mut s_chunks = scaled.chunks_exact_mut(4);
    let mut m_chunks = mix.chunks_exact(4);
    let mut n_chunks = nodes.chunks_exact(4);
    for ((s, m), l) in (&mut s_chunks).zip(&mut m_chunks).zip(&mut n_chunks) {
        for j in 0..4 {
            s[j] *= m[j];
            num[j] += l[j] * s[j];
            den[j] += s[j];
        }
    }
    let mut num_tail = 0.0;
    let mut den_tail = 0.0;
    for ((s, m), l) in s_chunks
        .into_remainder()
        .iter_mut()
        .zip(m_chunks.remainder())
        .zip(n_chunks.remainder())
    {
        *s *= m;
        num_tail += l * *s;
        den_tail += *s;
    }
    (
        num.iter().sum::<f64>() + num_tail,
        den.iter().sum::<f64>() + den_tail,
    )
}

fn weighted_sums(scaled: &[f64], nodes: &[f64]) -> (f64, f64) {
    scaled
        .iter()
        .zip(nodes)
        .fold((0.0, 0.0), |(num, den), (s, l)| (num + l * s, den + s))
}

impl Strategy for UpState {
    fn bet(&self) -> Bet {
        self.bet
    }

    fn update(&mut self, obs: &Observation) -> crate::Result<()> {
        UpState::update(self, obs.pair);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wealth::{mix, LogWealthLedger};
    use proptest::prelude::*;

    fn p(e1: f64, e2: f64) -> EValuePair {
        EValuePair::new(e1, e2).unwrap()
    }

    #[test]
    fn quadrature_invariants() {
        let s = UpState::default();
        assert_eq!(s.nodes().len(), DEFAULT_UP_NODES);
        assert!(s.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(s.nodes().iter().all(|&l| l > 0.0 && l < 1.0));
        let total: f64 = s.log_weights().iter().map(|w| w.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(s.log_node_wealth().iter().all(|&l| l == 0.0));
    }

    /// Closed-form arcsine moments E[lambda^m] = prod_{i<m} (2i + 1) / (2i + 2).
    fn beta_half_moment(m: u32) -> f64 {
        (0..m).map(|i| (2 * i + 1) as f64 / (2 * i + 2) as f64).product()
    }

    #[test]
    fn quadrature_reproduces_moments() {
        let s = UpState::default();
        let w = 1.0 / s.nodes().len() as f64;
        for m in [1, 2, 3, 10, 100, 1000] {
            let q: f64 = s.nodes().iter().map(|l| w * l.powi(m as i32)).sum();
            let exact = beta_half_moment(m);
            assert!(((q - exact) / exact).abs() < 1e-10, "m={m}: {q} vs {exact}");
        }
    }

    #[test]
    fn up_bet_examples() {
        let mut s = UpState::default();
        assert!((s.bet().value() - 0.5).abs() < 1e-15);
        s.update(p(0.0, 2.0));
        // E[lambda^2] / E[lambda] = 0.375 / 0.5
        assert!((s.bet().value() - 0.75).abs() < 1e-12);
        assert_eq!(beta_half_moment(2) / beta_half_moment(1), 0.75);

        let mut flat = UpState::default();
        flat.update(p(1.0, 1.0));
        assert!((flat.bet().value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn up_update_examples() {
        let mut s = UpState::default();
        s.update(p(1.0, 1.0));
        assert!(s.log_node_wealth().iter().all(|&l| l == 0.0));

        let mut s = UpState::default();
        s.update(p(0.0, 2.0));
        for (l, w) in s.nodes().iter().zip(s.log_node_wealth()) {
            assert!((w - (2.0 * l).ln()).abs() < 1e-14);
        }
        s.update(p(2.0, 0.0));
        for (l, w) in s.nodes().iter().zip(s.log_node_wealth()) {
            assert!((w - (4.0 * l * (1.0 - l)).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn all_zero_pair_ruins() {
        let mut s = UpState::default();
        s.update(p(0.0, 0.0));
        assert!(s.is_ruined());
        assert_eq!(s.bet(), Bet::HALF);
        assert_eq!(s.log_mixture_wealth(), f64::NEG_INFINITY);
        s.update(p(3.0, 1.0));
        assert_eq!(s.bet(), Bet::HALF);
    }

    #[test]
    fn cached_and_uncached_paths_agree() {
        // more distinct pairs than the cache holds
        let mut s = UpState::default();
        let mut t = UpState::new(DEFAULT_UP_NODES);
        let pairs: Vec<_> = (0..40).map(|i| p(0.1 + i as f64 * 0.05, 1.9 - i as f64 * 0.03)).collect();
        for round in 0..30 {
            for (i, pair) in pairs.iter().enumerate() {
                if (i + round) % 3 == 0 {
                    s.update(*pair);
                    t.update(*pair);
                }
            }
        }
        assert_eq!(s.bet(), t.bet());
        let a = s.log_node_wealth();
        let b = t.log_node_wealth();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
        assert!((s.bet().value() - s.bet_from_logs().value()).abs() < 1e-12);
    }

    #[test]
    fn recovers_after_long_one_sided_run() {
        // nodes near zero underflow in linear scale during the first run
        // and must come back once the data turns around
        let mut s = UpState::default();
        for _ in 0..2000 {
            s.update(p(0.0, 2.0));
        }
        assert!(s.bet().value() > 0.999);
        for _ in 0..6000 {
            s.update(p(2.0, 0.0));
        }
        let b = s.bet().value();
        assert!((b - 0.25).abs() < 1e-3, "bet {b}");
        assert!((b - s.bet_from_logs().value()).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn mixture_wealth_matches_sequential_ledger(
            pairs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..300)
        ) {
            let mut s = UpState::default();
            let mut ledger = LogWealthLedger::new();
            for (e1, e2) in pairs {
                let pair = p(e1, e2);
                prop_assert!((s.bet().value() - s.bet_from_logs().value()).abs() < 1e-10);
                ledger.record(s.bet(), pair);
                s.update(pair);
            }
            let a = s.log_mixture_wealth();
            let b = ledger.log_wealth();
            if a.is_finite() || b.is_finite() {
                prop_assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }

        #[test]
        fn up_bets_stay_in_unit_interval(
            pairs in prop::collection::vec((0.0f64..1e6, 0.0f64..1e6), 1..100)
        ) {
            let mut s = UpState::default();
            for (e1, e2) in pairs {
                let b = s.bet().value();
                prop_assert!((0.0..=1.0).contains(&b));
                let _ = mix(s.bet(), p(e1, e2));
                s.update(p(e1, e2));
            }
        }
    }
}
