//! Declarative experiment configuration.
//!
//! A configuration is a flat set of typed keys, written either as TOML or as
//! a JSON object:
//!
//! ```toml
//! problem = "piecewise_linear"
//! algorithm = "dss"          # mcs | ss | dss
//! n = 500                    # population size (sample count for mcs)
//! rho = 0.2
//! mcmc_corr = 0.8
//! partition = "angular"      # single | angular | halfspace | orthants
//! cuts = [-2.3415926535897931, 0.8]   # radians, angular only
//! # axis = 2                 # halfspace only (one-based)
//! # dim = 2                  # optional, must match the problem
//! eps_tol = 0.001
//! max_levels = 50
//! runs = 500
//! seed = 1
//! ```
//!
//! Only `problem` and `algorithm` are required.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::estimators::{DssConfig, SsConfig, DEFAULT_EPS_TOL, DEFAULT_MAX_LEVELS, DEFAULT_RHO};
use crate::kernels::McmcConfig;
use crate::limit_state::{LimitState, Registry};
use crate::partition::{Partition, PartitionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mcs,
    Ss,
    Dss,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mcs => "mcs",
            Algorithm::Ss => "ss",
            Algorithm::Dss => "dss",
        }
    }
}

/// Flat on-disk representation; every key is optional at this stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, alias = "level_prob", skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcmc_corr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub rho: f64,
    pub mcmc: McmcConfig,
    pub partition: PartitionSpec,
    pub eps_tol: f64,
    pub max_levels: usize,
    pub runs: usize,
    pub seed: u64,
    /// Declared input dimension, checked against the problem.
    pub dim: Option<usize>,
}

/// An experiment with its problem and partition instantiated.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub limit_state: LimitState,
    pub partition: Partition,
}

pub fn parse_toml(text: &str) -> Result<RawConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_owned()))
}

pub fn parse_json(text: &str) -> Result<RawConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Parses a configuration file, picking the format from its first
/// non-blank character: `{` means JSON, anything else TOML. A JSON object
/// with a `config` member (as written to `summary.json`) yields that member.
pub fn parse_config(text: &str) -> Result<RawConfig, ConfigError> {
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let inner = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") => {
                map.remove("config").unwrap_or_default()
            }
            other => other,
        };
        serde_json::from_value(inner).map_err(|e| ConfigError::Parse(e.to_string()))
    } else {
        parse_toml(text)
    }
}

fn to_usize(v: u64, name: &'static str) -> Result<usize, ConfigError> {
    usize::try_from(v).map_err(|_| ConfigError::invalid(name, "value too large"))
}

impl RawConfig {
    /// Fills defaults and checks parameter domains. Problem names and
    /// dimensions are checked by [`ExperimentConfig::resolve`].
    pub fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        let problem = self.problem.ok_or(ConfigError::MissingKey("problem"))?;
        let algorithm = self.algorithm.ok_or(ConfigError::MissingKey("algorithm"))?;
        let partition = match self.partition.as_deref() {
            None | Some("single") => PartitionSpec::Single,
            Some("angular") => PartitionSpec::Angular {
                cuts: self.cuts.clone().ok_or(ConfigError::MissingKey("cuts"))?,
            },
            Some("halfspace") => PartitionSpec::Halfspace {
                axis: to_usize(self.axis.ok_or(ConfigError::MissingKey("axis"))?, "axis")?,
            },
            Some("orthants") => PartitionSpec::Orthants,
            Some(other) => {
                return Err(ConfigError::invalid(
                    "partition",
                    format!("unknown partition kind `{other}`"),
                ))
            }
        };
        if self.cuts.is_some() && !matches!(partition, PartitionSpec::Angular { .. }) {
            return Err(ConfigError::invalid(
                "cuts",
                "only valid for angular partitions",
            ));
        }
        if self.axis.is_some() && !matches!(partition, PartitionSpec::Halfspace { .. }) {
            return Err(ConfigError::invalid(
                "axis",
                "only valid for halfspace partitions",
            ));
        }
        if algorithm != Algorithm::Dss && partition != PartitionSpec::Single {
            return Err(ConfigError::invalid(
                "partition",
                format!(
                    "partitions are only used by dss, not {}",
                    algorithm.as_str()
                ),
            ));
        }
        let cfg = ExperimentConfig {
            problem,
            algorithm,
            n: to_usize(self.n.unwrap_or(1000), "n")?,
            rho: self.rho.unwrap_or(DEFAULT_RHO),
            mcmc: McmcConfig::new(self.mcmc_corr.unwrap_or(McmcConfig::DEFAULT_CORR))?,
            partition,
            eps_tol: self.eps_tol.unwrap_or(DEFAULT_EPS_TOL),
            max_levels: to_usize(
                self.max_levels.unwrap_or(DEFAULT_MAX_LEVELS as u64),
                "max_levels",
            )?,
            runs: to_usize(self.runs.unwrap_or(1), "runs")?,
            seed: self.seed.unwrap_or(0),
            dim: self.dim.map(|d| to_usize(d, "dim")).transpose()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.algorithm {
            Algorithm::Mcs => {
                if self.n == 0 {
                    return Err(ConfigError::invalid("n", "sample count must be at least 1"));
                }
            }
            Algorithm::Ss => self.ss_config().validate()?,
            Algorithm::Dss => self.dss_config().validate()?,
        }
        if self.runs == 0 {
            return Err(ConfigError::invalid("runs", "must be at least 1"));
        }
        Ok(())
    }

    pub fn ss_config(&self) -> SsConfig {
        SsConfig {
            n: self.n,
            rho: self.rho,
            mcmc: self.mcmc,
            max_levels: self.max_levels,
        }
    }

    pub fn dss_config(&self) -> DssConfig {
        DssConfig {
            n: self.n,
            rho: self.rho,
            mcmc: self.mcmc,
            eps_tol: self.eps_tol,
            max_levels: self.max_levels,
        }
    }

    /// Looks the problem up and builds the partition.
    pub fn resolve(&self, registry: &Registry) -> Result<Experiment, ConfigError> {
        self.validate()?;
        let limit_state = registry.lookup(&self.problem)?;
        if let Some(d) = self.dim {
            limit_state.check_dim(d)?;
        }
        let partition = self.partition.build(limit_state.dim())?;
        Ok(Experiment {
            config: self.clone(),
            limit_state,
            partition,
        })
    }

    /// The flat representation with every key spelled out.
    pub fn to_raw(&self) -> RawConfig {
        let (partition, cuts, axis) = match &self.partition {
            PartitionSpec::Single => ("single", None, None),
            PartitionSpec::Angular { cuts } => ("angular", Some(cuts.clone()), None),
            PartitionSpec::Halfspace { axis } => ("halfspace", None, Some(*axis as u64)),
            PartitionSpec::Orthants => ("orthants", None, None),
        };
        RawConfig {
            problem: Some(self.problem.clone()),
            algorithm: Some(self.algorithm),
            n: Some(self.n as u64),
            rho: Some(self.rho),
            mcmc_corr: Some(self.mcmc.corr()),
            partition: Some(partition.to_owned()),
            cuts,
            axis,
            dim: self.dim.map(|d| d as u64),
            eps_tol: Some(self.eps_tol),
            max_levels: Some(self.max_levels as u64),
            runs: Some(self.runs as u64),
            seed: Some(self.seed),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("flat config serializes")
    }
}

impl std::str::FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_config(s)?.into_config()
    }
}
