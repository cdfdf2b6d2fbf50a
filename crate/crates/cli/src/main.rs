//! Command-line front end: experiment runs, privacy audits, a worked
//! transcript over F_5, and exact resource bounds.
//!
//! Every parameter flag funnels through the same `key = value` setter the
//! config file uses, so `--config file` plus flag overrides always agree
//! with the file format. Exit codes: 0 on success, 2 for configuration
//! errors, 3 for runtime failures.

use bspir_core::audit::{
    audit_database_privacy_exhaustive, audit_user_privacy_exhaustive,
    certify_user_privacy_algebraic, AuditError, AuditInstance, AuditVariant,
};
use bspir_core::capacity::{accounting, capacity_omniscient_zero_error, to_f64, ChannelCost};
use bspir_core::decoder::decode;
use bspir_core::hashing::{answer_hashes, scheme_error_bound};
use bspir_core::params::{SchemeParams, SchemeSpec};
use bspir_core::scheme::{build_x_matrix, generate_answers, generate_queries, sample_masks, Dataset};
use bspir_core::sim::{run_experiment, ConfigError, ExperimentConfig};
use bspir_core::{DecodeStatus, FieldMatrix, HashCheckScope};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bspir",
    version,
    about = "Byzantine-resilient symmetric PIR: experiments, audits, and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and emit its report.
    Run(CommonArgs),
    /// Run the privacy audits; exhaustive parts need enumerable parameters.
    Audit(AuditArgs),
    /// Print one fully worked retrieval transcript over F_5.
    Golden(GoldenArgs),
    /// Print the exact rate, capacity, and analytic error bounds.
    Bounds(CommonArgs),
}

/// Parameter flags shared by the subcommands; unset flags leave the config
/// file value (or default) in place.
#[derive(Args, Default)]
struct CommonArgs {
    /// Flat `key = value` config file, applied before any flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Adversary model: secret-channel or untouched.
    #[arg(long)]
    model: Option<String>,
    /// Server count N.
    #[arg(long)]
    n: Option<String>,
    /// Collusion tolerance T.
    #[arg(long)]
    t: Option<String>,
    /// Byzantine server count B.
    #[arg(long)]
    b: Option<String>,
    /// Observed servers E (untouched model).
    #[arg(long)]
    e: Option<String>,
    /// Stored message count K.
    #[arg(long = "k-messages")]
    k_messages: Option<String>,
    /// Instances per message l.
    #[arg(long)]
    l: Option<String>,
    /// Hash count alpha.
    #[arg(long)]
    alpha: Option<String>,
    /// Appended randomness instances beta (untouched model).
    #[arg(long)]
    beta: Option<String>,
    /// Field modulus q; defaults to the smallest adequate prime.
    #[arg(long)]
    q: Option<String>,
    /// Trial count.
    #[arg(long)]
    trials: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Retrieved message number, one-based.
    #[arg(long)]
    k: Option<String>,
    /// Corruption strategy.
    #[arg(long)]
    strategy: Option<String>,
    /// Hash screen scope: all-rows or message-rows-only.
    #[arg(long = "hash-scope")]
    hash_scope: Option<String>,
    /// Consent to run the known-points ablation strategy.
    #[arg(long)]
    allow_ablation: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Report format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Mechanics variant: faithful, leaky-queries, unmasked-masks, or
    /// unpadded-message-hashes.
    #[arg(long)]
    variant: Option<String>,
    /// Enumeration budget for the exhaustive audits.
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Args)]
struct GoldenArgs {
    /// Seed for the secret and the masks of the transcript.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Retrieved message number, one-based.
    #[arg(long, default_value_t = 1)]
    k: u64,
}

enum CliError {
    Config(ConfigError),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(out, "{e}"),
            CliError::Runtime(e) => write!(out, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs = [
            ("model", &self.model),
            ("n", &self.n),
            ("t", &self.t),
            ("b", &self.b),
            ("e", &self.e),
            ("k_messages", &self.k_messages),
            ("l", &self.l),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("q", &self.q),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("k", &self.k),
            ("strategy", &self.strategy),
            ("hash_scope", &self.hash_scope),
            ("out", &self.out),
            ("format", &self.format),
        ];
        pairs
            .into_iter()
            .filter_map(|(key, value)| value.as_ref().map(|v| (key, v)))
            .collect()
    }

    fn is_all_default(&self) -> bool {
        self.config.is_none() && !self.allow_ablation && self.overrides().is_empty()
    }

    fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Runtime(format!("cannot read {}: {e}", path.display()))
                })?;
                ExperimentConfig::parse_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        for (key, value) in self.overrides() {
            config.set(key, value)?;
        }
        if self.allow_ablation {
            config.set("allow_ablation", "true")?;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Audit(args) => cmd_audit(&args),
        Command::Golden(args) => cmd_golden(&args),
        Command::Bounds(args) => cmd_bounds(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn cmd_run(args: &CommonArgs) -> Result<(), CliError> {
    let config = args.to_config()?;
    let report = run_experiment(&config).map_err(CliError::Config)?;
    let text = report.emit(config.format);
    match &config.out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}")))?;
            eprintln!(
                "wrote {path}: {} trials, {} errors",
                report.trials, report.errors
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_variant(s: &str) -> Result<AuditVariant, CliError> {
    match s {
        "faithful" => Ok(AuditVariant::Faithful),
        "leaky-queries" => Ok(AuditVariant::LeakyQueries),
        "unmasked-masks" => Ok(AuditVariant::UnmaskedMasks),
        "unpadded-message-hashes" => Ok(AuditVariant::UnpaddedMessageHashes),
        other => Err(CliError::Config(ConfigError::InvalidValue {
            key: "variant".into(),
            value: other.into(),
            reason: "unknown audit variant".into(),
        })),
    }
}

/// The smallest parameter sets whose randomness can be enumerated in full.
fn tiny_params(untouched: bool) -> SchemeParams {
    let spec = if untouched {
        SchemeSpec::untouched(2, 3, 1, 1, 1, 1, 1)
    } else {
        SchemeSpec::secret_channel(2, 3, 1, 1, 1, 1)
    };
    spec.modulus(3)
        .eval_points(vec![1, 2, 0])
        .allow_zero_eval_point()
        .build()
        .expect("the built-in audit parameters validate")
}

fn audit_one(instance: &AuditInstance, label: &str) -> Result<(), CliError> {
    match certify_user_privacy_algebraic(&instance.params) {
        Ok(()) => println!("{label} algebraic-certificate: every collusion submatrix invertible"),
        Err(subset) => {
            return Err(CliError::Runtime(format!(
                "{label} algebraic-certificate: singular submatrix at rows {subset:?}"
            )))
        }
    }
    match audit_user_privacy_exhaustive(instance, 0, 1) {
        Ok(audit) => println!(
            "{label} user-privacy: tv = {} over {} states{}",
            audit.max_tv_distance,
            audit.states,
            if audit.exact_zero { " (exact zero)" } else { "" }
        ),
        Err(AuditError::BudgetExceeded { states, budget }) => println!(
            "{label} user-privacy: skipped, {states} states over the {budget} budget"
        ),
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    }
    match audit_database_privacy_exhaustive(instance, 0) {
        Ok(audit) => println!(
            "{label} database-privacy: mi = {} base-q over {} states{}",
            audit.mutual_information_base_q,
            audit.states,
            if audit.exact_zero { " (exact zero)" } else { "" }
        ),
        Err(AuditError::BudgetExceeded { states, budget }) => println!(
            "{label} database-privacy: skipped, {states} states over the {budget} budget"
        ),
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    }
    Ok(())
}

fn cmd_audit(args: &AuditArgs) -> Result<(), CliError> {
    let variant = match &args.variant {
        Some(v) => Some(parse_variant(v)?),
        None => None,
    };
    if args.common.is_all_default() && variant.is_none() {
        // Built-in suite: both models faithful, then each broken variant.
        for (untouched, label) in [(false, "secret-channel"), (true, "untouched")] {
            let mut instance = AuditInstance::new(tiny_params(untouched));
            if let Some(budget) = args.budget {
                instance = instance.budget(budget);
            }
            audit_one(&instance, label)?;
        }
        for (variant, untouched, label) in [
            (AuditVariant::LeakyQueries, false, "control:leaky-queries"),
            (AuditVariant::UnmaskedMasks, false, "control:unmasked-masks"),
            (
                AuditVariant::UnpaddedMessageHashes,
                true,
                "control:unpadded-message-hashes",
            ),
        ] {
            let mut instance = AuditInstance::new(tiny_params(untouched)).variant(variant);
            if let Some(budget) = args.budget {
                instance = instance.budget(budget);
            }
            audit_one(&instance, label)?;
        }
        return Ok(());
    }
    let config = args.common.to_config()?;
    let params = config.to_params()?;
    let mut instance = AuditInstance::new(params);
    if let Some(v) = variant {
        instance = instance.variant(v);
    }
    if let Some(budget) = args.budget {
        instance = instance.budget(budget);
    }
    audit_one(&instance, config.model.name())
}

fn print_matrix(label: &str, m: &FieldMatrix) {
    for r in 0..m.rows() {
        println!("  {label}[{r}] = {:?}", m.row(r));
    }
}

fn cmd_golden(args: &GoldenArgs) -> Result<(), CliError> {
    let params = SchemeSpec::secret_channel(2, 3, 1, 1, 2, 1)
        .modulus(5)
        .eval_points(vec![1, 2, 0])
        .allow_zero_eval_point()
        .build()
        .expect("the worked example validates");
    if args.k == 0 || args.k > 2 {
        return Err(CliError::Config(ConfigError::InvalidValue {
            key: "k".into(),
            value: args.k.to_string(),
            reason: "the worked example stores 2 messages".into(),
        }));
    }
    let index = (args.k - 1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let dataset = Dataset::from_messages(&params, vec![vec![1, 2], vec![3, 4]])
        .expect("fixed store fits the worked example");
    println!("store over F_5, two messages of two instances:");
    println!("  w1 = {:?}", dataset.stored_message(0));
    println!("  w2 = {:?}", dataset.stored_message(1));
    println!("evaluation points: {:?}", params.eval_points());
    let art = generate_queries(&params, index, &mut rng)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("retrieving message {}:", args.k);
    print_matrix("secret", &art.user_secret);
    print_matrix("query", &art.queries);
    let masks = sample_masks(&params, &mut rng);
    print_matrix("mask", &masks);
    let payload = build_x_matrix(&params, &dataset, &art, &masks)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    print_matrix("payload", payload.matrix());
    let answers = generate_answers(&params, &payload);
    print_matrix("answer", &answers.answers);
    let bundle = answer_hashes(&params, &payload, &[2, 0], &[1])
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("hash point {:?}, committed rows:", bundle.points);
    print_matrix("hash", &bundle.values);
    let outcome = decode(&params, index, &answers, &bundle, HashCheckScope::AllRows)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    match outcome.status {
        DecodeStatus::Decoded { message } => {
            println!(
                "decoded message {} = {message:?} under {} hypotheses",
                args.k, outcome.passing_hypotheses
            );
        }
        other => return Err(CliError::Runtime(format!("clean decode failed: {other:?}"))),
    }
    Ok(())
}

fn cmd_bounds(args: &CommonArgs) -> Result<(), CliError> {
    let config = args.to_config()?;
    let params = config.to_params()?;
    let acc = accounting(&params);
    let bound = scheme_error_bound(&params);
    println!(
        "model {} N={} T={} B={} K={} l={} q={} alpha={} beta={}",
        config.model.name(),
        params.servers(),
        params.collusion(),
        params.byzantine(),
        params.messages(),
        params.instances(),
        params.field().modulus(),
        params.hash_count(),
        params.extra_instances(),
    );
    println!("rate            = {}/{} ({})", acc.rate.numer(), acc.rate.denom(), to_f64(acc.rate));
    println!(
        "capacity        = {}/{} ({})",
        acc.rate_capacity.numer(),
        acc.rate_capacity.denom(),
        to_f64(acc.rate_capacity)
    );
    println!(
        "rho             = {}/{} (threshold {}/{})",
        acc.rho.numer(),
        acc.rho.denom(),
        acc.rho_threshold.numer(),
        acc.rho_threshold.denom()
    );
    let omniscient = capacity_omniscient_zero_error(
        params.servers(),
        params.collusion(),
        params.byzantine(),
    );
    println!(
        "zero-error cap  = {}/{} ({})",
        omniscient.numer(),
        omniscient.denom(),
        to_f64(omniscient)
    );
    println!("answer symbols  = {}", acc.answer_symbols);
    match acc.channel {
        ChannelCost::Secret { symbols } => println!("secret channel  = {symbols} symbols"),
        ChannelCost::Broadcast { symbols } => println!("broadcast cost  = {symbols} symbols"),
    }
    println!("error bound     = {:e} at q, {:e} at l^2", bound.at_modulus, bound.at_l_squared);
    Ok(())
}
