use eptest::problems::two_sided_pair;
use eptest::sim::{stream, SourceDistribution};
use eptest::{mix, Bet, EValuePair, LogWealthLedger, ProblemSpec};
use proptest::prelude::*;
use rand::Rng;

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..60)
}

fn grid_value(ps: &[(f64, f64)], l: f64) -> f64 {
    ps.iter().map(|&(a, b)| ((1.0 - l) * a + l * b).ln()).sum()
}

#[test]
fn hindsight_examples() {
    let mut l = LogWealthLedger::new();
    l.record(Bet::HALF, EValuePair::new(0.0, 2.0).unwrap());
    let h = l.best_hindsight().unwrap();
    assert_eq!(h.bet, Bet::ONE);
    assert!((h.log_wealth - 2f64.ln()).abs() < 1e-15);
    l.record(Bet::HALF, EValuePair::new(2.0, 0.0).unwrap());
    let h = l.best_hindsight().unwrap();
    assert!((h.bet.value() - 0.5).abs() < 1e-12 && h.log_wealth.abs() < 1e-15);
    let mut flat = LogWealthLedger::new();
    flat.record(Bet::ONE, EValuePair::NEUTRAL);
    flat.record(Bet::ZERO, EValuePair::NEUTRAL);
    assert_eq!(flat.best_hindsight().unwrap().bet, Bet::HALF);
}

#[test]
fn null_pairs_are_e_values() {
    let n = 1_000_000;
    for mu0 in [0.2, 0.5, 0.7] {
        let mut rng = stream(31, (mu0 * 10.0) as u64);
        let xs: Vec<f64> = (0..n).map(|_| if rng.gen::<f64>() < mu0 { 1.0 } else { 0.0 }).collect();
        for k in 0..=10 {
            let bet = Bet::new(k as f64 / 10.0).unwrap();
            let vals: Vec<f64> = xs.iter().map(|&x| mix(bet, two_sided_pair(x, mu0).unwrap())).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt();
            assert!((mean - 1.0).abs() <= 4.0 * se + 1e-12, "mu0={mu0} bet={}: {mean} (se {se})", bet.value());
        }
    }
}

#[test]
fn null_sources_have_unit_mean_pairs() {
    for (src, mu0) in [("discrete:0.1@0.5,0.5@0.5", 0.3), ("beta:2,2,50", 0.5), ("bernoulli:0.25", 0.25)] {
        let d = src.parse::<SourceDistribution>().unwrap();
        let dist = d.to_finite(&ProblemSpec::bounded_two_sided(mu0).unwrap()).unwrap();
        let e1: f64 = dist.atoms().iter().map(|a| a.prob * a.pair.e1()).sum();
        let e2: f64 = dist.atoms().iter().map(|a| a.prob * a.pair.e2()).sum();
        assert!((e1 - 1.0).abs() < 1e-12 && (e2 - 1.0).abs() < 1e-12, "{src}");
    }
}

proptest! {
    #[test]
    fn mix_is_affine(e1 in 0.0f64..1e6, e2 in 0.0f64..1e6, l in 0.0f64..=1.0) {
        let p = EValuePair::new(e1, e2).unwrap();
        let v = mix(Bet::new(l).unwrap(), p);
        prop_assert!((v - (e1 + l * (e2 - e1))).abs() <= 1e-9 * (1.0 + e1.max(e2)));
    }

    #[test]
    fn log_wealth_is_concave(ps in pairs(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (fa, fb) = (grid_value(&ps, a), grid_value(&ps, b));
        let fm = grid_value(&ps, 0.5 * (a + b));
        if fa.is_finite() && fb.is_finite() {
            prop_assert!(fm >= 0.5 * (fa + fb) - 1e-12);
        }
    }

    #[test]
    fn hindsight_dominates_grid_and_constant_bets(ps in pairs(), l in 0.0f64..=1.0) {
        let mut ledger = LogWealthLedger::new();
        for &(a, b) in &ps {
            ledger.record(Bet::new(l).unwrap(), EValuePair::new(a, b).unwrap());
        }
        let best = ledger.best_hindsight().unwrap();
        prop_assert!(best.log_wealth >= ledger.log_wealth() - 1e-12 || ledger.log_wealth() == f64::NEG_INFINITY);
        let grid = (0..=10_000)
            .map(|k| grid_value(&ps, k as f64 / 10_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        if grid.is_finite() {
            prop_assert!(best.log_wealth >= grid - 1e-8, "{} < {}", best.log_wealth, grid);
        }
    }
}
