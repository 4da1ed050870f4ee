//! Seeded Monte Carlo experiments: sources, runners, audits and output.

pub mod audit;
pub mod config;
pub mod emit;
pub mod result;
pub mod rng;
pub mod runner;
pub mod source;

pub use audit::{audit_sequence, run_regret_audit, AuditConfig, AuditReport, Generator, SequenceAudit};
pub use config::{ExperimentConfig, OutputFormat, Outputs, RunKind};
pub use emit::{emit, read_records_csv, summary_json, write_records_csv, write_trace_csv};
pub use result::{
    summarize, OracleReport, OrderingReport, Record, RunResult, Scenario, StoppingSummary, StrategySummary,
    Summary, TracePoint,
};
pub use rng::stream;
pub use runner::{checkpoints, run_growth, run_rejection_times, run_stopping_times, run_type1, ORDERING_TOLERANCE};
pub use source::{Sampler, SourceDistribution};
