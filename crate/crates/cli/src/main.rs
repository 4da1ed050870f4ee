use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eptest::oracle::{rejection_time_bound, solve};
use eptest::sim::{
    emit, run_growth, run_regret_audit, run_stopping_times, AuditConfig, ExperimentConfig, OutputFormat, RunKind,
    RunResult, SourceDistribution,
};
use eptest::ProblemSpec;

/// Sequential tests by betting: oracles, Monte Carlo runs and regret audits.
#[derive(Parser)]
#[command(name = "eptest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the log-optimal bet and growth rate for a scenario.
    Oracle(OracleArgs),
    /// Growth of (1/n) log W_n at log-spaced checkpoints.
    Growth(RunArgs),
    /// Rejection times of the level-alpha tests.
    RejectTimes(RunArgs),
    /// Frequency of ever crossing 1/alpha under a null source.
    Type1(RunArgs),
    /// Check the universal portfolio's regret bound on random sequences.
    RegretAudit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct OracleArgs {
    /// TOML experiment config supplying `problem`, `alternative` and `alpha`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// e.g. `bounded2:0.3`, `bounded1:0.1`, `diffmeans`.
    #[arg(long, required_unless_present = "config")]
    problem: Option<String>,
    /// e.g. `bernoulli:0.4`, `discrete:0.2@0.5,0.9@0.5`.
    #[arg(long = "alt", required_unless_present = "config")]
    alternative: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct AuditArgs {
    /// TOML with `sequences`, `length` and `seed`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sequences: Option<u64>,
    #[arg(long)]
    length: Option<u64>,
    #[command(flatten)]
    overrides: Overrides,
}

enum Outcome {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Oracle(a) => oracle(a),
        Command::Growth(a) => experiment(a, RunKind::Growth),
        Command::RejectTimes(a) => experiment(a, RunKind::RejectTimes),
        Command::Type1(a) => experiment(a, RunKind::Type1),
        Command::RegretAudit(a) => audit(a),
    }
}

fn load(path: &Path, o: &Overrides) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::load(path)?;
    if let Some(seed) = o.seed {
        c.seed = seed;
    }
    if let Some(dir) = &o.out_dir {
        c.outputs.dir = dir.clone();
    }
    if let Some(f) = o.format {
        c.outputs.format = f.into();
    }
    Ok(c)
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn oracle(a: OracleArgs) -> Result<Outcome> {
    let (problem, alternative, alpha) = match &a.config {
        Some(path) => {
            let c = load(path, &a.overrides)?;
            (c.problem, c.alternative, c.alpha)
        }
        None => (
            a.problem.as_deref().unwrap_or_default().parse::<ProblemSpec>()?,
            a.alternative.as_deref().unwrap_or_default().parse::<SourceDistribution>()?,
            0.05,
        ),
    };
    let problem = a.problem.as_deref().map(str::parse).transpose()?.unwrap_or(problem);
    let alternative = a.alternative.as_deref().map(str::parse).transpose()?.unwrap_or(alternative);
    let alpha = a.alpha.unwrap_or(alpha);
    let sol = solve(&alternative.to_finite(&problem)?)?;
    let bound = rejection_time_bound(alpha, sol.ell_star).ok();
    let report = serde_json::json!({
        "problem": problem.to_string(),
        "alternative": alternative.to_string(),
        "alpha": alpha,
        "lambda_star": sol.lambda_star.value(),
        "gamma_star": sol.gamma_star,
        "ell_star": sol.ell_star,
        "rejection_time_bound": bound,
    });
    if matches!(a.overrides.format, Some(Format::Json)) {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("problem      {problem}");
        println!("alternative  {alternative}");
        println!("lambda*      {:.10}", sol.lambda_star.value());
        match sol.gamma_star {
            Some(g) => println!("gamma*       {g:.10}"),
            None => println!("gamma*       -"),
        }
        println!("ell*         {:.10}", sol.ell_star);
        match bound {
            Some(b) => println!("log(1/alpha)/ell* at alpha={alpha}: {b:.4}"),
            None => println!("log(1/alpha)/ell*: no finite bound (ell* <= 0)"),
        }
    }
    if let Some(dir) = &a.overrides.out_dir {
        write_json(dir, "oracle.json", &report)?;
    }
    Ok(Outcome::Ok)
}

fn print_result(r: &RunResult) {
    let s = &r.summary;
    println!(
        "{} {} under {} (alpha {}, horizon {}, {} replications, seed {})",
        s.scenario.run, s.scenario.problem, s.scenario.alternative, s.scenario.alpha, s.scenario.horizon,
        s.scenario.replications, s.seed
    );
    if let Some(o) = &s.oracle {
        println!("  oracle: lambda* {:.6}, ell* {:.6}", o.lambda_star, o.ell_star);
    }
    for a in &s.aggregates {
        match &a.stopping {
            None => println!("  {:<12} mean growth {:.6} (se {:.2e})", a.strategy, a.mean_growth, a.se_growth),
            Some(st) => println!(
                "  {:<12} mean tau {}{:.3} (se {:.3}), median {:.1}, censored {:.4}, crossed {:.4}",
                a.strategy,
                if st.mean_tau_is_lower_bound { ">= " } else { "" },
                st.mean_tau,
                st.se_tau,
                st.median_tau,
                st.censored_fraction,
                st.crossing_fraction
            ),
        }
    }
    if let Some(o) = &s.ordering {
        println!(
            "  ordering co96 <= oj23 <= up: {} steps, {} violations, max excess {:.3e}",
            o.steps_checked, o.violations, o.max_excess
        );
    }
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
}

fn experiment(a: RunArgs, kind: RunKind) -> Result<Outcome> {
    let c = load(&a.config, &a.overrides)?;
    let results = match kind {
        RunKind::Growth => vec![run_growth(&c)?],
        _ => run_stopping_times(&c, kind, &c.all_alphas())?,
    };
    let nested = results.len() > 1;
    let mut violation = false;
    for r in &results {
        let dir = if nested {
            c.outputs.dir.join(format!("alpha-{}", r.summary.scenario.alpha))
        } else {
            c.outputs.dir.clone()
        };
        print_result(r);
        for path in emit(r, &dir, c.outputs.format)? {
            println!("  wrote {}", path.display());
        }
        violation |= r.summary.ordering.is_some_and(|o| o.violations > 0);
    }
    Ok(if violation { Outcome::Violation } else { Outcome::Ok })
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditFile {
    sequences: Option<u64>,
    length: Option<u64>,
    seed: Option<u64>,
}

fn audit(a: AuditArgs) -> Result<Outcome> {
    let mut cfg = AuditConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let f: AuditFile = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.sequences = f.sequences.unwrap_or(cfg.sequences);
        cfg.length = f.length.unwrap_or(cfg.length);
        cfg.seed = f.seed.unwrap_or(cfg.seed);
    }
    cfg.sequences = a.sequences.unwrap_or(cfg.sequences);
    cfg.length = a.length.unwrap_or(cfg.length);
    cfg.seed = a.overrides.seed.unwrap_or(cfg.seed);
    let report = run_regret_audit(&cfg)?;
    println!(
        "regret audit: {} sequences x {} steps, {} violations, max R_n - bound {:.6}",
        cfg.sequences, cfg.length, report.violations, report.max_excess
    );
    if let Some(w) = report.worst.as_ref().filter(|w| w.violations > 0) {
        println!(
            "  worst: sequence {} ({:?}) first violated at n = {:?}",
            w.index, w.generator, w.first_violation
        );
    }
    if let Some(dir) = &a.overrides.out_dir {
        let path = write_json(dir, "audit.json", &report)?;
        println!("  wrote {}", path.display());
    }
    Ok(if report.passed() { Outcome::Ok } else { Outcome::Violation })
}
