//! Experiment configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::options::OptionSet;
use crate::base::params::AlgoParams;
use crate::env::{Generator, Placement};
use crate::error::{Error, Result};
use crate::linear::{ConvexDomain, SolverOptions};
use crate::oracle::{DiscreteDistribution, JointDistribution};

pub const DEFAULT_CHECKPOINTS: [usize; 4] = [100, 1_000, 10_000, 100_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Lwc,
    LwcImperfect,
    Btrl,
    Hedge,
    Hwc,
    Cwc,
    MetaUcbv,
    ExploreExploit,
    CorrExploit,
    Ucb1TopTwo,
}

impl PolicyKind {
    pub fn family(self) -> Family {
        match self {
            PolicyKind::Lwc
            | PolicyKind::LwcImperfect
            | PolicyKind::Btrl
            | PolicyKind::Hedge
            | PolicyKind::Hwc => Family::Linear,
            PolicyKind::Cwc => Family::Convex,
            PolicyKind::MetaUcbv
            | PolicyKind::ExploreExploit
            | PolicyKind::CorrExploit
            | PolicyKind::Ucb1TopTwo => Family::Bandit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Linear,
    Convex,
    Bandit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionSpec {
    pub budget: u64,
    #[serde(default = "front")]
    pub placement: Placement,
}

fn front() -> Placement {
    Placement::Front
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArmSpec {
    Bernoulli { means: Vec<f64> },
    Discrete { arms: Vec<DiscreteDistribution> },
    Joint { joint: JointDistribution },
    Tight { n: usize, delta: f64 },
}

/// Per-step convex losses `l^t(w) = |w - v^t|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "centers", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConvexLosses {
    /// The same center every step.
    Fixed { center: Vec<f64> },
    /// Centers uniform on the cube `[-r, r]^d`, fresh each step.
    Random { radius: f64 },
}

/// Which expected-reward benchmark bandit pseudo-regret is measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    /// The best single arm mean.
    #[default]
    BestArm,
    /// The best single arm mean, charging nothing on steps whose pair beats
    /// it.
    BestArmClipped,
    /// The best pair's `E[max]`.
    BestPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    Adversarial {
        dim: usize,
        generator: Generator,
        /// Defaults to the simplex vertices (experts).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        options: Option<OptionSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        corruption: Option<CorruptionSpec>,
    },
    Stochastic {
        arms: ArmSpec,
        #[serde(default)]
        benchmark: Benchmark,
    },
    Convex {
        domain: ConvexDomain,
        losses: ConvexLosses,
        #[serde(default)]
        solver: SolverOptions,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub policy: PolicyKind,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub emit_curve: bool,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<usize>,
    #[serde(default)]
    pub params: AlgoParams,
    pub env: EnvSpec,
}

fn one() -> usize {
    1
}

fn default_checkpoints() -> Vec<usize> {
    DEFAULT_CHECKPOINTS.to_vec()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        };
        parsed.map_err(|e| match e {
            Error::Config(reason) => Error::Parse {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes to JSON")
    }

    /// Checkpoints within the horizon, sorted and deduplicated.
    pub fn checkpoints_in_horizon(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .checkpoints
            .iter()
            .copied()
            .filter(|&t| t >= 1 && t <= self.horizon)
            .collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::param("horizon", "T must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::param("replications", "R must be at least 1"));
        }
        let family = self.policy.family();
        let name = serde_json::to_value(self.policy).expect("policy name");
        let incompatible = |env: &str| {
            Err(Error::Incompatible(format!("policy {name} cannot run on a {env} environment")))
        };
        match (&self.env, family) {
            (EnvSpec::Adversarial { dim, options, corruption, .. }, Family::Linear) => {
                if *dim == 0 {
                    return Err(Error::param("dim", "loss vectors need at least one coordinate"));
                }
                if let Some(opts) = options {
                    opts.validate()?;
                    if opts.dim() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: opts.dim(),
                        });
                    }
                    if matches!(self.policy, PolicyKind::Hedge | PolicyKind::Hwc)
                        && !matches!(opts, OptionSet::SimplexVertices { .. })
                    {
                        return Err(Error::Incompatible(format!(
                            "policy {name} needs the experts (simplex) option set"
                        )));
                    }
                }
                if corruption.is_some() && matches!(self.policy, PolicyKind::Hedge | PolicyKind::Btrl) {
                    return Err(Error::Incompatible(format!(
                        "policy {name} never consults the oracle, so corruption has no effect"
                    )));
                }
                if !matches!(self.policy, PolicyKind::LwcImperfect) {
                    self.params.validate()?;
                }
                Ok(())
            }
            (EnvSpec::Stochastic { arms, .. }, Family::Bandit) => {
                let n = match arms {
                    ArmSpec::Bernoulli { means } => means.len(),
                    ArmSpec::Discrete { arms } => arms.len(),
                    ArmSpec::Joint { joint } => joint.dim(),
                    ArmSpec::Tight { n, .. } => *n,
                };
                if n < 2 {
                    return Err(Error::param("arms", "bandit policies need at least 2 arms"));
                }
                if self.policy == PolicyKind::MetaUcbv && !matches!(arms, ArmSpec::Bernoulli { .. } | ArmSpec::Discrete { .. }) {
                    return Err(Error::Incompatible(
                        "meta UCB-V assumes independent arms".into(),
                    ));
                }
                Ok(())
            }
            (EnvSpec::Convex { domain, .. }, Family::Convex) => {
                domain.validate()?;
                self.params.validate()
            }
            (EnvSpec::Adversarial { .. }, _) => incompatible("full-information adversarial"),
            (EnvSpec::Stochastic { .. }, _) => incompatible("stochastic bandit"),
            (EnvSpec::Convex { .. }, _) => incompatible("convex"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LWC: &str = r#"
policy = "lwc"
horizon = 1000
seed = 7
replications = 4
[params]
eta = 0.4
[env]
kind = "adversarial"
dim = 3
generator = { name = "constant", loss = [1.0, 0.0, 0.5] }
"#;

    #[test]
    fn parses_toml_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(LWC).unwrap();
        assert_eq!(cfg.policy, PolicyKind::Lwc);
        assert_eq!(cfg.checkpoints, DEFAULT_CHECKPOINTS.to_vec());
        assert_eq!(cfg.checkpoints_in_horizon(), vec![100, 1000]);
        assert_eq!(cfg.params.epsilon, AlgoParams::default().epsilon);
        assert!(!cfg.emit_curve);
    }

    #[test]
    fn toml_and_json_round_trip() {
        let cfg = ExperimentConfig::from_toml_str(LWC).unwrap();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
        let json = serde_json::to_string(&cfg.to_json()).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&json).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let zero = LWC.replace("horizon = 1000", "horizon = 0");
        assert!(matches!(
            ExperimentConfig::from_toml_str(&zero),
            Err(Error::Parameter { name: "horizon", .. })
        ));
        let no_reps = LWC.replace("replications = 4", "replications = 0");
        assert!(ExperimentConfig::from_toml_str(&no_reps).is_err());
        let meta = LWC.replace("\"lwc\"", "\"meta-ucbv\"");
        assert!(matches!(
            ExperimentConfig::from_toml_str(&meta),
            Err(Error::Incompatible(_))
        ));
        let typo = LWC.replace("seed = 7", "sed = 7");
        assert!(matches!(ExperimentConfig::from_toml_str(&typo), Err(Error::Config(_))));
    }

    #[test]
    fn bandit_config() {
        let text = r#"
policy = "meta-ucbv"
horizon = 100
[env]
kind = "stochastic"
arms = { law = "bernoulli", means = [0.5, 0.4] }
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert!(matches!(cfg.env, EnvSpec::Stochastic { benchmark: Benchmark::BestArm, .. }));
        let tight = text.replace(
            "{ law = \"bernoulli\", means = [0.5, 0.4] }",
            "{ law = \"tight\", n = 4, delta = 0.04 }",
        );
        assert!(ExperimentConfig::from_toml_str(&tight).is_err());
        let corr = tight.replace("meta-ucbv", "corr-exploit");
        assert!(ExperimentConfig::from_toml_str(&corr).is_ok());
    }
}
