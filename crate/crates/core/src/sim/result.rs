//! Per-replication records and the summaries derived from them.

use serde::{Deserialize, Serialize};

use crate::oracle::OracleSolution;
use crate::sim::config::{ExperimentConfig, RunKind};

/// One row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub replication: u64,
    pub strategy: String,
    /// Final `n` for growth runs; the stopping time (or the horizon when
    /// censored) for stopping-time runs.
    pub n_or_tau: u64,
    pub censored: bool,
    pub log_wealth: f64,
    /// `log_wealth / n_or_tau`.
    pub growth: f64,
}

/// One row of `trace.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub replication: u64,
    pub strategy: String,
    pub n: u64,
    pub log_wealth: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub run: RunKind,
    pub problem: String,
    pub alternative: String,
    pub alpha: f64,
    pub horizon: u64,
    pub replications: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub lambda_star: f64,
    pub gamma_star: Option<f64>,
    pub ell_star: f64,
    /// `log(1/alpha) / ell_star`, when `ell_star > 0`.
    pub rejection_time_bound: Option<f64>,
}

impl OracleReport {
    pub fn new(sol: &OracleSolution, alpha: f64) -> Self {
        Self {
            lambda_star: sol.lambda_star.value(),
            gamma_star: sol.gamma_star,
            ell_star: sol.ell_star,
            rejection_time_bound: crate::oracle::rejection_time_bound(alpha, sol.ell_star).ok(),
        }
    }
}

/// Stopping-time statistics; absent for growth runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingSummary {
    /// Mean of `n_or_tau`, a lower bound on `E[tau]` when any run was censored.
    pub mean_tau: f64,
    pub mean_tau_is_lower_bound: bool,
    pub se_tau: f64,
    pub median_tau: f64,
    pub q10_tau: f64,
    pub q90_tau: f64,
    pub censored_fraction: f64,
    /// Fraction of runs that crossed `1/alpha` within the horizon.
    pub crossing_fraction: f64,
    pub crossing_se: f64,
    pub mean_tau_over_log_inv_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub replications: u64,
    pub mean_growth: f64,
    pub se_growth: f64,
    pub mean_log_wealth: f64,
    pub stopping: Option<StoppingSummary>,
}

/// Largest violation of `CO96 <= OJ23 <= UP` seen along any path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub steps_checked: u64,
    pub tolerance: f64,
    pub violations: u64,
    /// `max(co96 - oj23, oj23 - up)` over all steps; negative when strict.
    pub max_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: Scenario,
    pub oracle: Option<OracleReport>,
    pub aggregates: Vec<StrategySummary>,
    pub ordering: Option<OrderingReport>,
    pub warnings: Vec<String>,
    pub config: ExperimentConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub records: Vec<Record>,
    pub trace: Vec<TracePoint>,
    pub summary: Summary,
}

impl RunResult {
    pub fn aggregate(&self, strategy: &str) -> Option<&StrategySummary> {
        self.summary.aggregates.iter().find(|a| a.strategy == strategy)
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 || !mean.is_finite() {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Aggregates records per strategy, in the order given.
pub fn summarize(records: &[Record], strategies: &[String], stopping: bool, alpha: f64) -> Vec<StrategySummary> {
    strategies
        .iter()
        .map(|name| {
            let rows: Vec<&Record> = records.iter().filter(|r| &r.strategy == name).collect();
            let growth: Vec<f64> = rows.iter().map(|r| r.growth).collect();
            let (mean_growth, se_growth) = mean_and_se(&growth);
            let logw: Vec<f64> = rows.iter().map(|r| r.log_wealth).collect();
            let (mean_log_wealth, _) = mean_and_se(&logw);
            let stopping = stopping.then(|| {
                let taus: Vec<f64> = rows.iter().map(|r| r.n_or_tau as f64).collect();
                let (mean_tau, se_tau) = mean_and_se(&taus);
                let mut sorted = taus.clone();
                sorted.sort_by(f64::total_cmp);
                let censored = rows.iter().filter(|r| r.censored).count() as f64;
                let n = rows.len() as f64;
                let crossing = 1.0 - censored / n;
                StoppingSummary {
                    mean_tau,
                    mean_tau_is_lower_bound: censored > 0.0,
                    se_tau,
                    median_tau: quantile(&sorted, 0.5),
                    q10_tau: quantile(&sorted, 0.1),
                    q90_tau: quantile(&sorted, 0.9),
                    censored_fraction: censored / n,
                    crossing_fraction: crossing,
                    crossing_se: (crossing * (1.0 - crossing) / n).sqrt(),
                    mean_tau_over_log_inv_alpha: mean_tau / (1.0 / alpha).ln(),
                }
            });
            StrategySummary {
                strategy: name.clone(),
                replications: rows.len() as u64,
                mean_growth,
                se_growth,
                mean_log_wealth,
                stopping,
            }
        })
        .collect()
}
