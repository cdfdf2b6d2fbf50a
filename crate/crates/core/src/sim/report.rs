//! Experiment reports: a frozen single-row CSV schema, a JSON mirror with
//! the per-classification counts, and the one-sided confidence bound the
//! error rates are quoted with.
//!
//! Exact rational quantities travel as `numerator/denominator` strings so no
//! precision is lost in transit; floating-point fields round-trip through
//! the shortest-representation formatting both serializers use.

use crate::capacity::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One-sided 99% normal quantile.
const Z_99: f64 = 2.3263478740408408;

/// Wilson score upper confidence bound, one-sided at 99%.
pub fn wilson_upper_99(errors: u64, trials: u64) -> f64 {
    assert!(trials > 0, "no trials, no bound");
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let radius = Z_99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center + radius) / denom
}

/// The zero-event bound `4.6 / n`, the 99% analogue of the rule of three.
pub fn rule_of_three_99(trials: u64) -> f64 {
    assert!(trials > 0, "no trials, no bound");
    4.6 / trials as f64
}

/// The upper bound reports quote: rule-of-three at zero observed errors,
/// Wilson otherwise.
pub fn error_ucb99(errors: u64, trials: u64) -> f64 {
    if errors == 0 {
        rule_of_three_99(trials)
    } else {
        wilson_upper_99(errors, trials)
    }
}

/// Output encoding of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> ReportError {
    ReportError::Malformed(msg.into())
}

/// Per-classification trial counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassificationCounts {
    pub correct: u64,
    pub wrong_message: u64,
    pub ambiguous: u64,
    pub no_candidate: u64,
    pub phase1_failure: u64,
}

impl ClassificationCounts {
    pub fn add(&mut self, c: crate::sim::trial::Classification) {
        use crate::sim::trial::Classification::*;
        match c {
            Correct => self.correct += 1,
            WrongMessage => self.wrong_message += 1,
            Ambiguous => self.ambiguous += 1,
            NoCandidate => self.no_candidate += 1,
            Phase1Failure => self.phase1_failure += 1,
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.correct += other.correct;
        self.wrong_message += other.wrong_message;
        self.ambiguous += other.ambiguous;
        self.no_candidate += other.no_candidate;
        self.phase1_failure += other.phase1_failure;
        self
    }

    pub fn total(&self) -> u64 {
        self.correct + self.wrong_message + self.ambiguous + self.no_candidate
            + self.phase1_failure
    }

    /// Every non-correct trial counts as an error, broadcast failures
    /// included.
    pub fn errors(&self) -> u64 {
        self.total() - self.correct
    }
}

/// Exact rational as a `numerator/denominator` string.
pub fn ratio_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_ratio(s: &str) -> Result<Rational, ReportError> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| malformed(format!("expected a/b, got `{s}`")))?;
    let n: u64 = n.parse().map_err(|_| malformed("bad numerator"))?;
    let d: u64 = d.parse().map_err(|_| malformed("bad denominator"))?;
    if d == 0 {
        return Err(malformed("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// One experiment's results. CSV carries the twenty-one fixed columns; JSON
/// additionally carries the seed and the per-classification counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub model: String,
    pub servers: u64,
    pub collusion: u64,
    pub byzantine: u64,
    pub observed: u64,
    pub messages: u64,
    pub instances: u64,
    pub modulus: u64,
    pub hash_count: u64,
    pub extra_instances: u64,
    pub strategy: String,
    pub trials: u64,
    pub errors: u64,
    pub err_rate: Option<f64>,
    pub err_ucb99: Option<f64>,
    pub analytic_bound: f64,
    pub rate: String,
    pub rate_capacity: String,
    pub rho: String,
    pub rho_threshold: String,
    pub seconds: f64,
    pub seed: Option<u64>,
    pub counts: Option<ClassificationCounts>,
}

const CSV_HEADER: [&str; 21] = [
    "model",
    "N",
    "T",
    "B",
    "E",
    "K",
    "l",
    "q",
    "alpha",
    "beta",
    "strategy",
    "trials",
    "errors",
    "err_rate",
    "err_ucb99",
    "analytic_bound",
    "rate",
    "rate_capacity",
    "rho",
    "rho_threshold",
    "seconds",
];

fn opt_f64_string(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt_f64(s: &str) -> Result<Option<f64>, ReportError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| malformed(format!("bad float `{s}`")))
}

impl ExperimentReport {
    pub fn csv_header() -> String {
        CSV_HEADER.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        w.write_record([
            self.model.clone(),
            self.servers.to_string(),
            self.collusion.to_string(),
            self.byzantine.to_string(),
            self.observed.to_string(),
            self.messages.to_string(),
            self.instances.to_string(),
            self.modulus.to_string(),
            self.hash_count.to_string(),
            self.extra_instances.to_string(),
            self.strategy.clone(),
            self.trials.to_string(),
            self.errors.to_string(),
            opt_f64_string(self.err_rate),
            opt_f64_string(self.err_ucb99),
            self.analytic_bound.to_string(),
            self.rate.clone(),
            self.rate_capacity.clone(),
            self.rho.clone(),
            self.rho_threshold.clone(),
            self.seconds.to_string(),
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 output")
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| malformed(e.to_string()))?.clone();
        if headers.iter().ne(CSV_HEADER) {
            return Err(malformed(format!("unexpected header `{headers:?}`")));
        }
        let record = r
            .records()
            .next()
            .ok_or_else(|| malformed("missing data row"))?
            .map_err(|e| malformed(e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(malformed(format!("{} fields in data row", record.len())));
        }
        let int = |i: usize| -> Result<u64, ReportError> {
            record[i]
                .parse()
                .map_err(|_| malformed(format!("bad integer `{}`", &record[i])))
        };
        let float = |i: usize| -> Result<f64, ReportError> {
            record[i]
                .parse()
                .map_err(|_| malformed(format!("bad float `{}`", &record[i])))
        };
        for i in [16usize, 17, 18, 19] {
            parse_ratio(&record[i])?;
        }
        Ok(ExperimentReport {
            model: record[0].to_string(),
            servers: int(1)?,
            collusion: int(2)?,
            byzantine: int(3)?,
            observed: int(4)?,
            messages: int(5)?,
            instances: int(6)?,
            modulus: int(7)?,
            hash_count: int(8)?,
            extra_instances: int(9)?,
            strategy: record[10].to_string(),
            trials: int(11)?,
            errors: int(12)?,
            err_rate: parse_opt_f64(&record[13])?,
            err_ucb99: parse_opt_f64(&record[14])?,
            analytic_bound: float(15)?,
            rate: record[16].to_string(),
            rate_capacity: record[17].to_string(),
            rho: record[18].to_string(),
            rho_threshold: record[19].to_string(),
            seconds: float(20)?,
            seed: None,
            counts: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
    }

    pub fn emit(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: ReportFormat) -> Result<Self, ReportError> {
        match format {
            ReportFormat::Csv => Self::from_csv(text),
            ReportFormat::Json => Self::from_json(text),
        }
    }

    /// The exact rational fields, parsed back.
    pub fn exact_rate(&self) -> Result<Rational, ReportError> {
        parse_ratio(&self.rate)
    }

    pub fn exact_rate_capacity(&self) -> Result<Rational, ReportError> {
        parse_ratio(&self.rate_capacity)
    }

    pub fn exact_rho(&self) -> Result<Rational, ReportError> {
        parse_ratio(&self.rho)
    }

    pub fn exact_rho_threshold(&self) -> Result<Rational, ReportError> {
        parse_ratio(&self.rho_threshold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        ExperimentReport {
            model: "secret-channel".into(),
            servers: 3,
            collusion: 1,
            byzantine: 1,
            observed: 0,
            messages: 2,
            instances: 32,
            modulus: 1031,
            hash_count: 2,
            extra_instances: 0,
            strategy: "random-overwrite".into(),
            trials: 100_000,
            errors: 3,
            err_rate: Some(3.0e-5),
            err_ucb99: Some(wilson_upper_99(3, 100_000)),
            analytic_bound: 2.89e-3,
            rate: "1/3".into(),
            rate_capacity: "1/3".into(),
            rho: "1/1".into(),
            rho_threshold: "1/1".into(),
            seconds: 12.5,
            seed: Some(7),
            counts: Some(ClassificationCounts {
                correct: 99_997,
                wrong_message: 0,
                ambiguous: 3,
                no_candidate: 0,
                phase1_failure: 0,
            }),
        }
    }

    #[test]
    fn ucb_frozen_values() {
        assert!((error_ucb99(0, 100_000) - 4.6e-5).abs() < 1e-18);
        assert!((error_ucb99(1, 100_000) - 7.274025305027856e-5).abs() < 1e-18);
        assert!((wilson_upper_99(3, 1000) - 0.010497755571142927).abs() < 1e-15);
        assert!((wilson_upper_99(5, 200) - 0.06577788342156812).abs() < 1e-15);
        assert!((wilson_upper_99(50, 1000) - 0.06859470563605183).abs() < 1e-15);
        assert!((wilson_upper_99(97, 10_000) - 0.012260008206752158).abs() < 1e-15);
    }

    #[test]
    fn ucb_never_undershoots_the_point_estimate() {
        for (e, n) in [(0u64, 10u64), (1, 10), (5, 100), (50, 1000), (999, 1000)] {
            assert!(error_ucb99(e, n) > e as f64 / n as f64);
        }
    }

    /// The quoted bound must cover the true rate at least 99% of the time;
    /// checked exactly against the binomial distribution at `n = 200`,
    /// `p = 0.03`.
    #[test]
    fn ucb_coverage_against_exact_binomial() {
        let n = 200u64;
        let p = 0.03f64;
        // Largest error count whose bound still excludes the truth.
        let uncovered_max = (0..=n)
            .take_while(|&e| error_ucb99(e, n) < p)
            .last()
            .expect("zero errors give 0.023 < 0.03");
        assert_eq!(uncovered_max, 0);
        let mut pmf = (1.0 - p).powi(n as i32);
        let mut miss_probability = 0.0;
        for e in 0..=uncovered_max {
            miss_probability += pmf;
            pmf *= (n - e) as f64 / (e + 1) as f64 * p / (1.0 - p);
        }
        let coverage = 1.0 - miss_probability;
        assert!((coverage - 0.9977387589900042).abs() < 1e-12);
        assert!(coverage >= 0.99);
    }

    #[test]
    fn counts_merge_and_total() {
        let mut a = ClassificationCounts::default();
        a.add(crate::sim::trial::Classification::Correct);
        a.add(crate::sim::trial::Classification::Ambiguous);
        let mut b = ClassificationCounts::default();
        b.add(crate::sim::trial::Classification::Correct);
        b.add(crate::sim::trial::Classification::Phase1Failure);
        let m = a.merge(b);
        assert_eq!(m.total(), 4);
        assert_eq!(m.errors(), 2);
        assert_eq!(m.correct, 2);
    }

    #[test]
    fn csv_header_is_frozen() {
        assert_eq!(
            ExperimentReport::csv_header(),
            "model,N,T,B,E,K,l,q,alpha,beta,strategy,trials,errors,err_rate,err_ucb99,\
             analytic_bound,rate,rate_capacity,rho,rho_threshold,seconds"
                .replace(' ', "")
        );
    }

    #[test]
    fn csv_round_trips_everything_it_carries() {
        let report = sample_report();
        let text = report.to_csv();
        assert_eq!(text.lines().count(), 2);
        let back = ExperimentReport::from_csv(&text).unwrap();
        let mut expect = report.clone();
        expect.seed = None;
        expect.counts = None;
        assert_eq!(back, expect);
        assert_eq!(back.exact_rate().unwrap(), Rational::new(1, 3));
    }

    #[test]
    fn json_round_trips_in_full() {
        let report = sample_report();
        let back = ExperimentReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.counts.unwrap().ambiguous, 3);
    }

    #[test]
    fn empty_optionals_survive_csv() {
        let mut report = sample_report();
        report.trials = 0;
        report.errors = 0;
        report.err_rate = None;
        report.err_ucb99 = None;
        let back = ExperimentReport::from_csv(&report.to_csv()).unwrap();
        assert_eq!(back.err_rate, None);
        assert_eq!(back.err_ucb99, None);
    }

    #[test]
    fn csv_rejects_foreign_headers() {
        assert!(ExperimentReport::from_csv("a,b,c\n1,2,3\n").is_err());
        assert!(ExperimentReport::from_csv(&ExperimentReport::csv_header()).is_err());
    }

    #[test]
    fn ratio_strings_are_exact() {
        assert_eq!(ratio_string(Rational::new(2, 4)), "1/2");
        assert_eq!(ratio_string(Rational::new(0, 5)), "0/1");
        assert_eq!(parse_ratio("49/100").unwrap(), Rational::new(49, 100));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
