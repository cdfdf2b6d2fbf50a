//! Monte Carlo experiment driver: runs a configured number of independent
//! trials in parallel and folds the classifications into a report.
//!
//! Each trial derives its randomness from the master seed and its own trial
//! number, so the counts are independent of thread scheduling and a rerun
//! with the same configuration reproduces them exactly.

use crate::capacity::accounting;
use crate::hashing::scheme_error_bound;
use crate::params::{Model, SchemeParams};
use crate::sim::config::{ConfigError, ExperimentConfig};
use crate::sim::report::{error_ucb99, ratio_string, ClassificationCounts, ExperimentReport};
use crate::sim::trial::run_trial;
use rayon::prelude::*;
use std::time::Instant;

/// Runs `config.trials` trials and summarizes them. The wall-clock field is
/// the only part of the report that varies between reruns.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ConfigError> {
    let params = config.to_params()?;
    let start = Instant::now();
    let counts = (0..config.trials)
        .into_par_iter()
        .fold(ClassificationCounts::default, |mut acc, trial| {
            let transcript = run_trial(
                &params,
                config.strategy,
                config.index(),
                config.scope,
                config.seed,
                trial,
            );
            acc.add(transcript.classification);
            acc
        })
        .reduce(ClassificationCounts::default, ClassificationCounts::merge);
    let seconds = start.elapsed().as_secs_f64();
    Ok(summarize(config, &params, counts, seconds))
}

/// Builds the report for counts already collected.
pub fn summarize(
    config: &ExperimentConfig,
    params: &SchemeParams,
    counts: ClassificationCounts,
    seconds: f64,
) -> ExperimentReport {
    let acc = accounting(params);
    let bound = scheme_error_bound(params);
    let trials = counts.total();
    let errors = counts.errors();
    let observed = match params.model() {
        Model::SecretChannel => 0,
        Model::Untouched { observed } => observed as u64,
    };
    ExperimentReport {
        model: config.model.name().to_string(),
        servers: params.servers() as u64,
        collusion: params.collusion() as u64,
        byzantine: params.byzantine() as u64,
        observed,
        messages: params.messages() as u64,
        instances: params.instances() as u64,
        modulus: params.field().modulus(),
        hash_count: params.hash_count() as u64,
        extra_instances: params.extra_instances() as u64,
        strategy: config.strategy.name().to_string(),
        trials,
        errors,
        err_rate: (trials > 0).then(|| errors as f64 / trials as f64),
        err_ucb99: (trials > 0).then(|| error_ucb99(errors, trials)),
        analytic_bound: bound.at_modulus,
        rate: ratio_string(acc.rate),
        rate_capacity: ratio_string(acc.rate_capacity),
        rho: ratio_string(acc.rho),
        rho_threshold: ratio_string(acc.rho_threshold),
        seconds,
        seed: Some(config.seed),
        counts: Some(counts),
    }
}
