//! The measurement harness: deterministic per-trial randomness, experiment
//! configuration, single protocol trials, Monte Carlo aggregation, and
//! report emission.

pub mod config;
pub mod experiment;
pub mod report;
pub mod rng;
pub mod trial;

pub use config::{ConfigError, ExperimentConfig, ModelKind};
pub use experiment::run_experiment;
pub use report::{
    error_ucb99, rule_of_three_99, wilson_upper_99, ClassificationCounts, ExperimentReport,
    ReportError, ReportFormat,
};
pub use rng::{trial_rng, StreamId};
pub use trial::{run_trial, Classification, TrialTranscript};
