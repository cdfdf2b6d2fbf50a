//! Experiment configuration: a flat `key = value` file format, the same keys
//! reusable as command-line overrides, and validation down to scheme
//! parameters.
//!
//! Message indices are one-based at this boundary (`k = 1` retrieves the
//! first message) and zero-based everywhere inside the library.

use crate::adversary::StrategyKind;
use crate::decoder::HashCheckScope;
use crate::params::{ParamsError, SchemeParams, SchemeSpec};
use crate::sim::report::ReportFormat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    BadLine { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("strategy known-p-forgery needs allow_ablation = true")]
    AblationNotAllowed,
    #[error("strategy known-p-forgery needs the secret-channel model")]
    AblationNeedsFullView,
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// Which adversary model the run uses; the observation count lives in its
/// own key so the two can be set in either order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    SecretChannel,
    Untouched,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::SecretChannel => "secret-channel",
            ModelKind::Untouched => "untouched",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "secret-channel" => Some(ModelKind::SecretChannel),
            "untouched" => Some(ModelKind::Untouched),
            _ => None,
        }
    }
}

/// Everything one experiment needs, with working defaults for the
/// three-server single-corruption setup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub servers: usize,
    pub collusion: usize,
    pub byzantine: usize,
    /// Servers the untouched-model adversary observes.
    pub observed: usize,
    pub messages: usize,
    pub instances: usize,
    /// Hash count; defaults to two under the secret-channel model and to the
    /// derived value under the untouched model.
    pub hash_count: Option<usize>,
    pub extra_instances: usize,
    pub modulus: Option<u64>,
    pub strategy: StrategyKind,
    pub trials: u64,
    pub seed: u64,
    /// Retrieved message, one-based.
    pub message_number: u64,
    pub scope: HashCheckScope,
    pub allow_ablation: bool,
    pub out: Option<String>,
    pub format: ReportFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::SecretChannel,
            servers: 3,
            collusion: 1,
            byzantine: 1,
            observed: 0,
            messages: 2,
            instances: 32,
            hash_count: None,
            extra_instances: 0,
            modulus: None,
            strategy: StrategyKind::RandomOverwrite,
            trials: 10_000,
            seed: 0,
            message_number: 1,
            scope: HashCheckScope::AllRows,
            allow_ablation: false,
            out: None,
            format: ReportFormat::Csv,
        }
    }
}

fn invalid(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(key, value, "not a number in range"))
}

impl ExperimentConfig {
    /// Applies one `key = value` pair; the config file and the command line
    /// both funnel through here.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "model" => {
                self.model = ModelKind::parse(value)
                    .ok_or_else(|| invalid(key, value, "expected secret-channel or untouched"))?;
            }
            "strategy" => {
                self.strategy = StrategyKind::parse(value)
                    .ok_or_else(|| invalid(key, value, "unknown strategy"))?;
            }
            "n" => self.servers = parse_num(key, value)?,
            "t" => self.collusion = parse_num(key, value)?,
            "b" => self.byzantine = parse_num(key, value)?,
            "e" => self.observed = parse_num(key, value)?,
            "k_messages" => self.messages = parse_num(key, value)?,
            "l" => self.instances = parse_num(key, value)?,
            "alpha" => self.hash_count = Some(parse_num(key, value)?),
            "beta" => self.extra_instances = parse_num(key, value)?,
            "q" => self.modulus = Some(parse_num(key, value)?),
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "k" => {
                self.message_number = parse_num(key, value)?;
                if self.message_number == 0 {
                    return Err(invalid(key, value, "message numbers start at 1"));
                }
            }
            "hash_scope" => {
                self.scope = match value {
                    "all-rows" => HashCheckScope::AllRows,
                    "message-rows-only" => HashCheckScope::MessageRowsOnly,
                    _ => return Err(invalid(key, value, "expected all-rows or message-rows-only")),
                };
            }
            "allow_ablation" => {
                self.allow_ablation = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(invalid(key, value, "expected true or false")),
                };
            }
            "out" => self.out = Some(value.to_string()),
            "format" => {
                self.format = match value {
                    "csv" => ReportFormat::Csv,
                    "json" => ReportFormat::Json,
                    _ => return Err(invalid(key, value, "expected csv or json")),
                };
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parses a whole config file on top of the defaults.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine { line: i + 1 });
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// The retrieved message index, zero-based.
    pub fn index(&self) -> usize {
        (self.message_number - 1) as usize
    }

    /// Validates and builds the scheme parameters.
    pub fn to_params(&self) -> Result<SchemeParams, ConfigError> {
        if self.strategy == StrategyKind::KnownPForgery {
            if !self.allow_ablation {
                return Err(ConfigError::AblationNotAllowed);
            }
            if self.model != ModelKind::SecretChannel {
                return Err(ConfigError::AblationNeedsFullView);
            }
        }
        if self.index() >= self.messages {
            return Err(invalid(
                "k",
                &self.message_number.to_string(),
                &format!("only {} messages are stored", self.messages),
            ));
        }
        let mut spec = match self.model {
            ModelKind::SecretChannel => {
                let alpha = self.hash_count.unwrap_or(2);
                if self.extra_instances != 0 {
                    return Err(invalid(
                        "beta",
                        &self.extra_instances.to_string(),
                        "the secret-channel model appends no randomness",
                    ));
                }
                SchemeSpec::secret_channel(
                    self.messages,
                    self.servers,
                    self.collusion,
                    self.byzantine,
                    self.instances,
                    alpha,
                )
            }
            ModelKind::Untouched => {
                let spec = SchemeSpec::untouched(
                    self.messages,
                    self.servers,
                    self.collusion,
                    self.byzantine,
                    self.observed,
                    self.instances,
                    self.extra_instances,
                );
                if let Some(alpha) = self.hash_count {
                    let derived = self
                        .servers
                        .saturating_sub(self.collusion + self.byzantine)
                        * self.extra_instances;
                    if alpha != derived {
                        return Err(invalid(
                            "alpha",
                            &alpha.to_string(),
                            &format!("the untouched model derives alpha = {derived}"),
                        ));
                    }
                }
                spec
            }
        };
        if let Some(q) = self.modulus {
            spec = spec.modulus(q);
        }
        Ok(spec.build()?)
    }
}
