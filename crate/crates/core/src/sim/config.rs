//! Declarative experiment configuration, read from TOML.
//!
//! ```toml
//! problem = "bounded2:0.3"
//! alternative = "bernoulli:0.4"
//! strategies = ["up", "co96", "oj23", "ons"]
//! alpha = 0.01
//! horizon = 20000
//! replications = 64
//! seed = 7
//!
//! [outputs]
//! dir = "out/growth"
//! format = "both"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{ProblemKind, ProblemSpec};
use crate::sim::source::SourceDistribution;
use crate::strategies::StrategySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Growth,
    RejectTimes,
    Type1,
}

impl RunKind {
    pub fn default_horizon(&self) -> u64 {
        match self {
            Self::Growth => 20_000,
            Self::RejectTimes => 100_000,
            Self::Type1 => 10_000,
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Growth => "growth",
            Self::RejectTimes => "reject-times",
            Self::Type1 => "type1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(&self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(&self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            _ => Err(Error::Config(format!("unknown format `{s}` (expected csv, json or both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Write growth traces at log-spaced checkpoints.
    #[serde(default = "default_true")]
    pub trace: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: OutputFormat::default(),
            trace: true,
        }
    }
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replications() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub alternative: SourceDistribution,
    pub strategies: Vec<StrategySpec>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Extra levels for stopping-time runs; all share one set of paths.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
    /// Defaults depend on the run: see [`RunKind::default_horizon`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemSpec, alternative: SourceDistribution, strategies: Vec<StrategySpec>) -> Self {
        Self {
            problem,
            alternative,
            strategies,
            alpha: default_alpha(),
            alphas: Vec::new(),
            horizon: None,
            replications: default_replications(),
            seed: 0,
            outputs: Outputs::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let check_alpha = |a: f64| {
            if a > 0.0 && a < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidAlpha(a))
            }
        };
        check_alpha(self.alpha)?;
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        if self.horizon == Some(0) {
            return Err(Error::Config("horizon must be at least 1".to_string()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".to_string()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".to_string()));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return Err(Error::Config(format!("strategy `{s}` is listed twice")));
            }
        }
        self.alternative.check_problem(&self.problem)
    }

    pub fn horizon_for(&self, kind: RunKind) -> u64 {
        self.horizon.unwrap_or_else(|| kind.default_horizon())
    }

    /// `alpha` followed by any extra `alphas`, without repeats.
    pub fn all_alphas(&self) -> Vec<f64> {
        let mut out = vec![self.alpha];
        for &a in &self.alphas {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    /// Whether the alternative satisfies the null of the problem.
    pub fn alternative_is_null(&self) -> bool {
        let mean = self.alternative.mean();
        let tol = 1e-12;
        match self.problem.kind() {
            ProblemKind::BoundedOneSided => mean <= self.problem.mu0() + tol,
            ProblemKind::BoundedTwoSided => (mean - self.problem.mu0()).abs() <= tol,
            ProblemKind::DiffMeans => mean.abs() <= tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
problem = "bounded2:0.3"
alternative = "bernoulli:0.4"
strategies = ["up", "co96", "oj23", "const:0.4"]
alpha = 0.01
alphas = [0.001]
horizon = 500
replications = 3
seed = 11

[outputs]
dir = "x"
format = "csv"
trace = false
"#;

    #[test]
    fn parses_full_config() {
        let c = ExperimentConfig::from_toml_str(FULL).unwrap();
        assert_eq!(c.problem, ProblemSpec::bounded_two_sided(0.3).unwrap());
        assert_eq!(c.strategies.len(), 4);
        assert_eq!(c.horizon_for(RunKind::Growth), 500);
        assert_eq!(c.all_alphas(), vec![0.01, 0.001]);
        assert_eq!(c.outputs.format, OutputFormat::Csv);
        assert!(!c.outputs.trace);
        assert!(!c.alternative_is_null());
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml_str(
            "problem = \"diffmeans\"\nalternative = \"discrete2:0.5/0.5@1\"\nstrategies = [\"ons\"]\n",
        )
        .unwrap();
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.replications, 100);
        assert_eq!(c.horizon_for(RunKind::Type1), 10_000);
        assert_eq!(c.horizon_for(RunKind::RejectTimes), 100_000);
        assert_eq!(c.outputs, Outputs::default());
        assert!(c.alternative_is_null());
    }

    #[test]
    fn rejects_invalid() {
        let base = "problem = \"bounded2:0.5\"\nalternative = \"bernoulli:0.5\"\n";
        for extra in [
            "strategies = []",
            "strategies = [\"up\", \"up\"]",
            "strategies = [\"up\"]\nalpha = 1.0",
            "strategies = [\"up\"]\nalphas = [0.0]",
            "strategies = [\"up\"]\nhorizon = 0",
            "strategies = [\"up\"]\nreplications = 0",
            "strategies = [\"up\"]\nunknown = 1",
            "strategies = [\"upp\"]",
        ] {
            assert!(ExperimentConfig::from_toml_str(&format!("{base}{extra}")).is_err(), "{extra}");
        }
        let mismatch = "problem = \"diffmeans\"\nalternative = \"bernoulli:0.5\"\nstrategies = [\"up\"]";
        assert!(ExperimentConfig::from_toml_str(mismatch).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::from_toml_str(FULL).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"problem\":\"bounded2:0.3\""));
    }
}
