//! Power-sum hashing of protocol rows, verification, and the analytic error
//! bounds the Monte Carlo runs are measured against.
//!
//! A hash point `p` maps a row `(r_1, ..., r_m)` to `sum_i r_i p^i`. The
//! exponent starts at one, so the map has no constant term: a nonzero
//! difference between two rows is a nonzero polynomial of degree at most `m`
//! with root zero excluded, and at most `m - 1` of the `q - 1` candidate
//! points can collide. That is the whole forgery story, and
//! [`collision_points`] checks it exhaustively.
//!
//! Two bundle flavors exist. Answer-level bundles hash the answer rows of a
//! fixed set of `N - B` servers and travel over secret channels; the user
//! unmixes them into per-payload-row hashes with [`payload_row_hashes`].
//! Message-level bundles hash each stored message (appended randomness
//! included) and travel over the authenticated broadcast.

use crate::field::{Field, FieldError, FieldMatrix};
use crate::params::{Model, SchemeParams};
use crate::scheme::{build_generators, Dataset, PayloadMatrix};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    #[error("duplicate exponent point {0}")]
    DuplicateExponentPoint(u64),
    #[error("exponent point zero is forbidden")]
    ZeroExponentPoint,
    #[error("exponent point {0} is not a field element")]
    ExponentPointOutOfRange(u64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("message hashing needs appended randomness (beta >= 1)")]
    MissingAppendedRandomness,
    #[error("bad server set: {0}")]
    BadServerSet(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which rows a bundle commits to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashFlavor {
    /// Hashes of the answer rows of `server_set` (size `N - B`).
    AnswerLevel { server_set: Vec<usize> },
    /// One hash row per stored message.
    MessageLevel,
}

/// Hash points plus the committed values, one row of `alpha` symbols per
/// hashed row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashBundle {
    pub points: Vec<u64>,
    /// Length of the rows the bundle commits to.
    pub preimage_len: usize,
    pub values: FieldMatrix,
    pub flavor: HashFlavor,
}

/// Draws `count` distinct nonzero hash points by rejection, in order.
pub fn sample_hash_points(field: Field, count: usize, rng: &mut dyn RngCore) -> Vec<u64> {
    assert!(
        (count as u64) < field.modulus(),
        "cannot draw {count} distinct nonzero points"
    );
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = field.sample_nonzero(rng);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}

fn check_points(field: Field, points: &[u64]) -> Result<(), HashError> {
    for (i, &p) in points.iter().enumerate() {
        if p >= field.modulus() {
            return Err(HashError::ExponentPointOutOfRange(p));
        }
        if p == 0 {
            return Err(HashError::ZeroExponentPoint);
        }
        if points[..i].contains(&p) {
            return Err(HashError::DuplicateExponentPoint(p));
        }
    }
    Ok(())
}

/// The `rows x |points|` exponent matrix with entry `(i, j)` equal to
/// `points[j]^(i+1)`.
pub fn build_p_matrix(
    field: Field,
    points: &[u64],
    rows: usize,
) -> Result<FieldMatrix, HashError> {
    check_points(field, points)?;
    let mut m = FieldMatrix::zeros(field, rows, points.len());
    for (j, &p) in points.iter().enumerate() {
        let mut acc = p;
        for i in 0..rows {
            m.set(i, j, acc);
            acc = field.mul(acc, p);
        }
    }
    Ok(m)
}

/// Hashes every row of `rows` at every point: `rows * P`.
pub fn hash_rows(rows: &FieldMatrix, points: &[u64]) -> Result<FieldMatrix, HashError> {
    let p = build_p_matrix(rows.field(), points, rows.cols())?;
    Ok(rows.matmul(&p))
}

/// Answer-level bundle: the hashes of `server_set`'s clean answer rows,
/// computed as `G_set X P`.
pub fn answer_hashes(
    params: &SchemeParams,
    payload: &PayloadMatrix,
    server_set: &[u64],
    points: &[u64],
) -> Result<HashBundle, HashError> {
    let set: Vec<usize> = server_set.iter().map(|&s| s as usize).collect();
    if set.len() != params.payload_rows() {
        return Err(HashError::BadServerSet(format!(
            "need {} servers, got {}",
            params.payload_rows(),
            set.len()
        )));
    }
    for (i, &s) in set.iter().enumerate() {
        if s >= params.servers() {
            return Err(HashError::BadServerSet(format!("server {s} out of range")));
        }
        if set[..i].contains(&s) {
            return Err(HashError::BadServerSet(format!("server {s} repeated")));
        }
    }
    if points.len() != params.hash_count() {
        return Err(HashError::ShapeMismatch(format!(
            "expected {} hash points, got {}",
            params.hash_count(),
            points.len()
        )));
    }
    let gens = build_generators(params);
    let rows = gens.combined.select_rows(&set).matmul(payload.matrix());
    let values = hash_rows(&rows, points)?;
    Ok(HashBundle {
        points: points.to_vec(),
        preimage_len: params.total_instances(),
        values,
        flavor: HashFlavor::AnswerLevel { server_set: set },
    })
}

/// Unmixes an answer-level bundle into per-payload-row hashes `X P` by
/// inverting the server-set encoder.
pub fn payload_row_hashes(
    params: &SchemeParams,
    bundle: &HashBundle,
) -> Result<FieldMatrix, HashError> {
    let HashFlavor::AnswerLevel { server_set } = &bundle.flavor else {
        return Err(HashError::ShapeMismatch(
            "payload-row hashes need an answer-level bundle".into(),
        ));
    };
    let gens = build_generators(params);
    let sub = gens.combined.select_rows(server_set);
    Ok(sub.solve(&bundle.values)?)
}

/// Message-level bundle: one hash row per stored message, padding included.
pub fn message_hashes(
    params: &SchemeParams,
    dataset: &Dataset,
    points: &[u64],
) -> Result<HashBundle, HashError> {
    if params.extra_instances() == 0 {
        return Err(HashError::MissingAppendedRandomness);
    }
    if points.len() != params.hash_count() {
        return Err(HashError::ShapeMismatch(format!(
            "expected {} hash points, got {}",
            params.hash_count(),
            points.len()
        )));
    }
    if dataset.message_count() != params.messages() {
        return Err(HashError::ShapeMismatch(
            "dataset does not match parameters".into(),
        ));
    }
    let mut rows = FieldMatrix::zeros(
        params.field(),
        params.messages(),
        params.stored_message_len(),
    );
    for k in 0..params.messages() {
        rows.set_row(k, dataset.stored_message(k));
    }
    let values = hash_rows(&rows, points)?;
    Ok(HashBundle {
        points: points.to_vec(),
        preimage_len: params.stored_message_len(),
        values,
        flavor: HashFlavor::MessageLevel,
    })
}

/// Checks candidate rows against a bundle's committed values, one verdict per
/// row. Row `i` of `rows` is compared against row `i` of the bundle.
pub fn verify(rows: &FieldMatrix, bundle: &HashBundle) -> Result<Vec<bool>, HashError> {
    if rows.cols() != bundle.preimage_len {
        return Err(HashError::ShapeMismatch(format!(
            "rows have length {}, bundle commits to length {}",
            rows.cols(),
            bundle.preimage_len
        )));
    }
    if rows.rows() != bundle.values.rows() {
        return Err(HashError::ShapeMismatch(format!(
            "{} rows against {} committed hash rows",
            rows.rows(),
            bundle.values.rows()
        )));
    }
    let got = hash_rows(rows, &bundle.points)?;
    Ok((0..rows.rows())
        .map(|r| got.row(r) == bundle.values.row(r))
        .collect())
}

/// Nonzero points at which a row difference hashes to zero. `delta` holds
/// the coefficients of `x^1 .. x^m`; the count is at most `m - 1`.
pub fn collision_points(field: Field, delta: &[u64]) -> Vec<u64> {
    let mut roots = Vec::new();
    for p in 1..field.modulus() {
        let mut acc = 0u64;
        let mut power = p;
        for &d in delta {
            acc = field.add(acc, field.mul(d, power));
            power = field.mul(power, p);
        }
        if acc == 0 {
            roots.push(p);
        }
    }
    roots
}

/// Probability that a single uniformly drawn hash point fails to expose a
/// fixed nonzero row difference of length at most `n`: at most `n / q`.
pub fn single_point_miss_bound(n: usize, modulus: u64) -> f64 {
    n as f64 / modulus as f64
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Analytic probability bound on a decoding error, at the configured modulus
/// and, for comparison, at the idealized modulus `l^2` the asymptotic
/// analysis uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub at_modulus: f64,
    pub at_l_squared: f64,
}

/// The union bound over corruption hypotheses: secret-channel runs pay
/// `C(N,B) (l/q)^alpha`; untouched runs hash whole stored messages and add
/// the broadcast failure term, `C(N,B) ((N-T-B)(l+beta)/q)^alpha + N/q^N`.
pub fn scheme_error_bound(params: &SchemeParams) -> ErrorBound {
    let n = params.servers();
    let b = params.byzantine();
    let alpha = params.hash_count() as i32;
    let l = params.instances() as f64;
    let hypotheses = binomial(n, b);
    let eval = |q: f64| -> f64 {
        match params.model() {
            Model::SecretChannel => hypotheses * (l / q).powi(alpha),
            Model::Untouched { .. } => {
                let preimage = (params.block_len() * params.total_instances()) as f64;
                hypotheses * (preimage / q).powi(alpha) + n as f64 / q.powi(n as i32)
            }
        }
    };
    ErrorBound {
        at_modulus: eval(params.field().modulus() as f64),
        at_l_squared: eval(l * l),
    }
}
