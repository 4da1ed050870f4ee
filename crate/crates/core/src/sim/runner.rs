//! Monte Carlo runners.
//!
//! Every replication draws one data path from `stream(seed, r)` and feeds
//! it to all configured processes, so strategies are compared on
//! identical data.

use crate::eprocess::{RegretBoundKind, RegretProcess, SequentialTest, StoppingTime};
use crate::error::{Error, Result};
use crate::oracle::solve;
use crate::problems::{Observation, ProblemSpec};
use crate::sim::config::{ExperimentConfig, RunKind};
use crate::sim::result::{summarize, OracleReport, OrderingReport, Record, RunResult, Scenario, Summary, TracePoint};
use crate::sim::rng::stream;
use crate::sim::source::Sampler;
use crate::strategies::{AnyStrategy, Strategy, StrategySpec};
use crate::wealth::{Bet, LogWealthLedger, Retention};

/// Slack allowed in the pathwise `CO96 <= OJ23 <= UP` check.
pub const ORDERING_TOLERANCE: f64 = 1e-9;

enum Process {
    Bet {
        strategy: AnyStrategy,
        ledger: LogWealthLedger,
    },
    Regret(RegretProcess),
}

impl Process {
    fn new(spec: &StrategySpec, problem: &ProblemSpec, oracle_bet: Option<Bet>) -> Result<Self> {
        Ok(match spec.build(problem, oracle_bet)? {
            Some(strategy) => Self::Bet {
                strategy,
                ledger: LogWealthLedger::with_retention(Retention::Streaming),
            },
            None => Self::Regret(RegretProcess::new(match spec {
                StrategySpec::Co96 => RegretBoundKind::Co96,
                _ => RegretBoundKind::Oj23,
            })),
        })
    }

    fn step(&mut self, obs: &Observation) -> Result<f64> {
        match self {
            Self::Bet { strategy, ledger } => {
                ledger.record(strategy.bet(), obs.pair);
                strategy.update(obs)?;
                Ok(ledger.log_wealth())
            }
            Self::Regret(p) => Ok(p.observe(obs.pair)),
        }
    }
}

/// Everything a replication needs, prepared once per run.
struct Plan {
    problem: ProblemSpec,
    sampler: Sampler,
    specs: Vec<StrategySpec>,
    names: Vec<String>,
    oracle: Option<OracleReport>,
    oracle_bet: Option<Bet>,
    warnings: Vec<String>,
    seed: u64,
}

impl Plan {
    fn new(config: &ExperimentConfig, alpha: f64) -> Result<Self> {
        config.validate()?;
        let mut warnings = Vec::new();
        let (oracle, oracle_bet) = match config.alternative.to_finite(&config.problem).and_then(|d| solve(&d)) {
            Ok(sol) => (Some(OracleReport::new(&sol, alpha)), Some(sol.lambda_star)),
            Err(e) => {
                warnings.push(format!("no oracle for this scenario: {e}"));
                (None, None)
            }
        };
        if config.strategies.contains(&StrategySpec::Oracle) && oracle_bet.is_none() {
            return Err(Error::Config("strategy `oracle` needs a solvable alternative".to_string()));
        }
        Ok(Self {
            problem: config.problem,
            sampler: config.alternative.sampler()?,
            specs: config.strategies.clone(),
            names: config.strategies.iter().map(|s| s.to_string()).collect(),
            oracle,
            oracle_bet,
            warnings,
            seed: config.seed,
        })
    }

    fn processes(&self) -> Result<Vec<Process>> {
        self.specs
            .iter()
            .map(|s| Process::new(s, &self.problem, self.oracle_bet))
            .collect()
    }

    /// Runs replication `rep` for up to `horizon` steps. `visit` sees the
    /// step index and every process's log value, and returns `false` to
    /// stop early.
    fn run_path(&self, rep: u64, horizon: u64, mut visit: impl FnMut(u64, &[f64]) -> bool) -> Result<()> {
        let mut rng = stream(self.seed, rep);
        let mut procs = self.processes()?;
        let mut values = vec![0.0; procs.len()];
        for n in 1..=horizon {
            let obs = self.problem.observe(self.sampler.draw(&mut rng))?;
            for (p, v) in procs.iter_mut().zip(values.iter_mut()) {
                *v = p.step(&obs)?;
            }
            if !visit(n, &values) {
                break;
            }
        }
        Ok(())
    }

    fn summary(&self, config: &ExperimentConfig, run: RunKind, alpha: f64, records: &[Record]) -> Summary {
        Summary {
            scenario: Scenario {
                run,
                problem: self.problem.to_string(),
                alternative: config.alternative.to_string(),
                alpha,
                horizon: config.horizon_for(run),
                replications: config.replications,
            },
            oracle: self.oracle,
            aggregates: summarize(records, &self.names, run != RunKind::Growth, alpha),
            ordering: None,
            warnings: self.warnings.clone(),
            config: config.clone(),
            seed: config.seed,
        }
    }
}

/// `1, 2, 5, 10, 20, 50, ...` up to `horizon`, plus `horizon`.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            match decade.checked_mul(m) {
                Some(c) if c <= horizon => out.push(c),
                _ => break 'outer,
            }
        }
        match decade.checked_mul(10) {
            Some(d) => decade = d,
            None => break,
        }
    }
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

/// Growth of `(1/n) log W_n` along each path, with the oracle reference.
///
/// When `up`, `co96` and `oj23` are all configured, the ordering
/// `CO96 <= OJ23 <= UP` is checked at every step.
pub fn run_growth(config: &ExperimentConfig) -> Result<RunResult> {
    let plan = Plan::new(config, config.alpha)?;
    let horizon = config.horizon_for(RunKind::Growth);
    let marks = checkpoints(horizon);
    let find = |s: StrategySpec| config.strategies.iter().position(|x| *x == s);
    let triple = match (find(StrategySpec::Up), find(StrategySpec::Co96), find(StrategySpec::Oj23)) {
        (Some(u), Some(c), Some(o)) => Some((u, c, o)),
        _ => None,
    };
    let mut ordering = triple.map(|_| OrderingReport {
        steps_checked: 0,
        tolerance: ORDERING_TOLERANCE,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    });
    let mut records = Vec::new();
    let mut trace = Vec::new();
    for rep in 0..config.replications {
        let mut last = vec![0.0; plan.specs.len()];
        let mut next_mark = 0usize;
        plan.run_path(rep, horizon, |n, values| {
            if let (Some((u, c, o)), Some(report)) = (triple, ordering.as_mut()) {
                let excess = (values[c] - values[o]).max(values[o] - values[u]);
                report.steps_checked += 1;
                if excess > ORDERING_TOLERANCE {
                    report.violations += 1;
                }
                if excess > report.max_excess {
                    report.max_excess = excess;
                }
            }
            if config.outputs.trace && marks.get(next_mark) == Some(&n) {
                next_mark += 1;
                for (name, &v) in plan.names.iter().zip(values) {
                    trace.push(TracePoint {
                        replication: rep,
                        strategy: name.clone(),
                        n,
                        log_wealth: v,
                        growth: v / n as f64,
                    });
                }
            }
            last.copy_from_slice(values);
            true
        })?;
        for (name, &v) in plan.names.iter().zip(&last) {
            records.push(Record {
                replication: rep,
                strategy: name.clone(),
                n_or_tau: horizon,
                censored: false,
                log_wealth: v,
                growth: v / horizon as f64,
            });
        }
    }
    let mut summary = plan.summary(config, RunKind::Growth, config.alpha, &records);
    summary.ordering = ordering;
    Ok(RunResult {
        records,
        trace,
        summary,
    })
}

/// Level-`alpha` stopping times for each `alpha`, all from one set of paths.
pub fn run_stopping_times(config: &ExperimentConfig, run: RunKind, alphas: &[f64]) -> Result<Vec<RunResult>> {
    if alphas.is_empty() {
        return Err(Error::Config("no levels to test".to_string()));
    }
    let horizon = config.horizon_for(run);
    let plans = alphas
        .iter()
        .map(|&a| Plan::new(config, a))
        .collect::<Result<Vec<_>>>()?;
    let plan = &plans[0];
    let mut records: Vec<Vec<Record>> = vec![Vec::new(); alphas.len()];
    for rep in 0..config.replications {
        let mut tests: Vec<Vec<SequentialTest>> = (0..plan.specs.len())
            .map(|_| alphas.iter().map(|&a| SequentialTest::new(a, horizon)).collect())
            .collect::<Result<_>>()?;
        plan.run_path(rep, horizon, |_, values| {
            let mut open = false;
            for (ts, &v) in tests.iter_mut().zip(values) {
                for t in ts.iter_mut() {
                    t.step(v);
                    open |= !t.is_done();
                }
            }
            open
        })?;
        for (name, ts) in plan.names.iter().zip(&tests) {
            for (k, t) in ts.iter().enumerate() {
                let (tau, censored) = match t.state() {
                    StoppingTime::Rejected(tau) => (tau, false),
                    _ => (horizon, true),
                };
                records[k].push(Record {
                    replication: rep,
                    strategy: name.clone(),
                    n_or_tau: tau,
                    censored,
                    log_wealth: t.last_log_value(),
                    growth: t.last_log_value() / tau as f64,
                });
            }
        }
    }
    let mut out = Vec::with_capacity(alphas.len());
    for ((plan, &alpha), records) in plans.iter().zip(alphas).zip(records) {
        let mut summary = plan.summary(config, run, alpha, &records);
        match run {
            RunKind::RejectTimes => {
                if plan.oracle.is_some_and(|o| o.ell_star <= 0.0) {
                    summary
                        .warnings
                        .push("oracle growth is not positive: the test may never reject".to_string());
                }
            }
            RunKind::Type1 => {
                if !config.alternative_is_null() {
                    summary
                        .warnings
                        .push("the data source does not satisfy the null".to_string());
                }
            }
            RunKind::Growth => {}
        }
        out.push(RunResult {
            records,
            trace: Vec::new(),
            summary,
        });
    }
    Ok(out)
}

/// Rejection times at `config.alpha`.
pub fn run_rejection_times(config: &ExperimentConfig) -> Result<RunResult> {
    Ok(run_stopping_times(config, RunKind::RejectTimes, &[config.alpha])?.remove(0))
}

/// Crossing frequency of `1/alpha` within the horizon at `config.alpha`.
pub fn run_type1(config: &ExperimentConfig) -> Result<RunResult> {
    Ok(run_stopping_times(config, RunKind::Type1, &[config.alpha])?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::source::SourceDistribution;

    fn config(problem: &str, alt: &str, strategies: &[&str]) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            problem.parse().unwrap(),
            alt.parse::<SourceDistribution>().unwrap(),
            strategies.iter().map(|s| s.parse().unwrap()).collect(),
        );
        c.replications = 4;
        c.horizon = Some(300);
        c.seed = 5;
        c
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(1), vec![1]);
        assert_eq!(checkpoints(20_000), vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000, 20_000]);
        assert_eq!(checkpoints(30), vec![1, 2, 5, 10, 20, 30]);
        assert_eq!(*checkpoints(u64::MAX).last().unwrap(), u64::MAX);
    }

    #[test]
    fn growth_records_and_ordering() {
        let c = config("bounded2:0.3", "bernoulli:0.4", &["up", "co96", "oj23", "ons", "ftl", "oracle"]);
        let r = run_growth(&c).unwrap();
        assert_eq!(r.records.len(), 4 * 6);
        let ord = r.summary.ordering.unwrap();
        assert_eq!(ord.violations, 0);
        assert_eq!(ord.steps_checked, 4 * 300);
        assert!(r.summary.oracle.is_some());
        assert_eq!(r.trace.len(), 4 * 6 * checkpoints(300).len());
    }

    #[test]
    fn replications_are_prefix_stable() {
        let mut c = config("bounded2:0.5", "bernoulli:0.7", &["up", "ons"]);
        let small = run_growth(&c).unwrap();
        c.replications = 7;
        let big = run_growth(&c).unwrap();
        assert_eq!(small.records[..], big.records[..small.records.len()]);
    }

    #[test]
    fn constant_null_bet_never_moves_on_bernoulli() {
        let mut c = config("bounded2:0.3", "bernoulli:0.3", &["const:0.3", "up"]);
        c.alpha = 0.05;
        let r = run_type1(&c).unwrap();
        let s = r.aggregate("const:0.3").unwrap();
        assert_eq!(s.stopping.as_ref().unwrap().crossing_fraction, 0.0);
        assert!(r.records.iter().filter(|x| x.strategy == "const:0.3").all(|x| x.log_wealth.abs() < 1e-12));
        assert!(r.summary.warnings.is_empty());
    }

    #[test]
    fn stopping_runs_share_paths_across_levels() {
        let mut c = config("bounded2:0.1", "bernoulli:0.95", &["up"]);
        c.replications = 50;
        let runs = run_stopping_times(&c, RunKind::RejectTimes, &[0.01, 0.001]).unwrap();
        for (a, b) in runs[0].records.iter().zip(&runs[1].records) {
            assert!(a.n_or_tau <= b.n_or_tau);
        }
        let single = run_rejection_times(&{
            let mut c = c.clone();
            c.alpha = 0.001;
            c
        })
        .unwrap();
        assert_eq!(single.records, runs[1].records);
    }

    #[test]
    fn warnings() {
        let c = config("bounded2:0.3", "bernoulli:0.3", &["up"]);
        let r = run_rejection_times(&c).unwrap();
        assert!(!r.summary.warnings.is_empty());
        let c = config("bounded2:0.3", "bernoulli:0.6", &["up"]);
        let r = run_type1(&c).unwrap();
        assert!(!r.summary.warnings.is_empty());
    }

    #[test]
    fn diffmeans_runs() {
        let c = config("diffmeans", "independent:bernoulli:0.8|bernoulli:0.2", &["up", "ons", "co96"]);
        let r = run_growth(&c).unwrap();
        let up = r.aggregate("up").unwrap();
        assert!(up.mean_growth > 0.0);
    }
}
