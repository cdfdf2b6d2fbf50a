//! The retrieval protocol proper: replicated dataset layout, encoding
//! matrices, query generation, the masked payload matrix, and server answers.
//!
//! Each message is stored as `(N - T - B)(l + beta)` field symbols, grouped
//! into one block of `N - T - B` symbols per instance; the last `beta`
//! instances hold appended randomness used only by message hashing. A query
//! to server `n` is one row of `G_U U + G_e e`, where `U` is the user's secret
//! uniform matrix, `e` stacks the unit rows selecting the desired message's
//! block coordinates, and both encoders are Vandermonde-shaped on the server
//! evaluation points. Honest answers equal `G X` for the payload matrix `X`
//! whose top `T` rows are mask-protected mixtures and whose remaining rows
//! are the desired message's blocks.

use crate::field::{dot, FieldMatrix};
use crate::params::SchemeParams;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("message index {index} out of range for {messages} messages")]
    IndexOutOfRange { index: usize, messages: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// The replicated store: `K` messages, each `(N - T - B)(l + beta)` symbols
/// in instance-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    block_len: usize,
    total_instances: usize,
    instances: usize,
    messages: Vec<Vec<u64>>,
}

impl Dataset {
    /// Uniformly random contents, including the appended randomness of the
    /// final `beta` instances. Symbols are drawn message by message in
    /// storage order.
    pub fn random(params: &SchemeParams, rng: &mut dyn RngCore) -> Self {
        let f = params.field();
        let messages = (0..params.messages())
            .map(|_| {
                (0..params.stored_message_len())
                    .map(|_| f.sample(rng))
                    .collect()
            })
            .collect();
        Dataset {
            block_len: params.block_len(),
            total_instances: params.total_instances(),
            instances: params.instances(),
            messages,
        }
    }

    pub fn from_messages(
        params: &SchemeParams,
        messages: Vec<Vec<u64>>,
    ) -> Result<Self, SchemeError> {
        if messages.len() != params.messages() {
            return Err(SchemeError::ShapeMismatch(format!(
                "expected {} messages, got {}",
                params.messages(),
                messages.len()
            )));
        }
        for (k, m) in messages.iter().enumerate() {
            if m.len() != params.stored_message_len() {
                return Err(SchemeError::ShapeMismatch(format!(
                    "message {k} has {} symbols, expected {}",
                    m.len(),
                    params.stored_message_len()
                )));
            }
            if m.iter().any(|&v| v >= params.field().modulus()) {
                return Err(SchemeError::ShapeMismatch(format!(
                    "message {k} contains non-canonical symbols"
                )));
            }
        }
        Ok(Dataset {
            block_len: params.block_len(),
            total_instances: params.total_instances(),
            instances: params.instances(),
            messages,
        })
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// All stored symbols of one message, padding included.
    pub fn stored_message(&self, index: usize) -> &[u64] {
        &self.messages[index]
    }

    /// The retrievable part of one message (padding stripped).
    pub fn message_payload(&self, index: usize) -> &[u64] {
        &self.messages[index][..self.block_len * self.instances]
    }

    /// One message's block for a given instance.
    pub fn block(&self, index: usize, instance: usize) -> &[u64] {
        assert!(instance < self.total_instances, "instance out of range");
        let start = instance * self.block_len;
        &self.messages[index][start..start + self.block_len]
    }

    /// The stacked column of all messages' blocks for one instance, length
    /// `K (N - T - B)`.
    pub fn instance_column(&self, instance: usize) -> Vec<u64> {
        let mut col = Vec::with_capacity(self.messages.len() * self.block_len);
        for k in 0..self.messages.len() {
            col.extend_from_slice(self.block(k, instance));
        }
        col
    }
}

/// The three encoding matrices, all Vandermonde-shaped on the evaluation
/// points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    /// `N x T`: encodes the user's secret matrix.
    pub secret: FieldMatrix,
    /// `N x (N - T - B)`: encodes the message-selection rows; row `n` carries
    /// the powers `lambda_n^T .. lambda_n^{N-B-1}`.
    pub selector: FieldMatrix,
    /// `N x (N - B)`: the concatenation, a plain Vandermonde matrix.
    pub combined: FieldMatrix,
}

/// Builds the encoders for the given parameters.
pub fn build_generators(params: &SchemeParams) -> Generators {
    let f = params.field();
    let points = params.eval_points();
    let n = params.servers();
    let t = params.collusion();
    let combined = FieldMatrix::vandermonde(f, points, params.payload_rows())
        .expect("validated points are distinct");
    let mut secret = FieldMatrix::zeros(f, n, t);
    let mut selector = FieldMatrix::zeros(f, n, params.block_len());
    for r in 0..n {
        for c in 0..t {
            secret.set(r, c, combined.get(r, c));
        }
        for c in 0..params.block_len() {
            selector.set(r, c, combined.get(r, t + c));
        }
    }
    Generators {
        secret,
        selector,
        combined,
    }
}

/// What the user keeps and what it sends: the secret matrix `U` and the `N`
/// query rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryArtifacts {
    /// Desired message, zero-based.
    pub index: usize,
    /// `T x K(N - T - B)` uniform secret.
    pub user_secret: FieldMatrix,
    /// `N x K(N - T - B)`; row `n` goes to server `n`.
    pub queries: FieldMatrix,
}

/// The unit-row stack that selects message `index`'s block coordinates:
/// row `j` has a one at column `index * (N - T - B) + j`.
pub fn selection_rows(params: &SchemeParams, index: usize) -> FieldMatrix {
    let mut e = FieldMatrix::zeros(params.field(), params.block_len(), params.query_len());
    for j in 0..params.block_len() {
        e.set(j, index * params.block_len() + j, 1);
    }
    e
}

/// Deterministic half of query generation: encodes a given secret matrix.
pub fn queries_for_secret(
    params: &SchemeParams,
    index: usize,
    user_secret: &FieldMatrix,
) -> Result<QueryArtifacts, SchemeError> {
    if index >= params.messages() {
        return Err(SchemeError::IndexOutOfRange {
            index,
            messages: params.messages(),
        });
    }
    if user_secret.rows() != params.collusion() || user_secret.cols() != params.query_len() {
        return Err(SchemeError::ShapeMismatch(format!(
            "user secret is {}x{}, expected {}x{}",
            user_secret.rows(),
            user_secret.cols(),
            params.collusion(),
            params.query_len()
        )));
    }
    let gens = build_generators(params);
    let queries = gens
        .secret
        .matmul(user_secret)
        .add(&gens.selector.matmul(&selection_rows(params, index)));
    Ok(QueryArtifacts {
        index,
        user_secret: user_secret.clone(),
        queries,
    })
}

/// Samples the secret matrix row-major and encodes it.
pub fn generate_queries(
    params: &SchemeParams,
    index: usize,
    rng: &mut dyn RngCore,
) -> Result<QueryArtifacts, SchemeError> {
    let f = params.field();
    let mut user_secret = FieldMatrix::zeros(f, params.collusion(), params.query_len());
    for r in 0..user_secret.rows() {
        for c in 0..user_secret.cols() {
            user_secret.set(r, c, f.sample(rng));
        }
    }
    queries_for_secret(params, index, &user_secret)
}

/// Samples the servers' shared mask symbols, one row per colluding-tolerance
/// slot, one column per instance, drawn row-major.
pub fn sample_masks(params: &SchemeParams, rng: &mut dyn RngCore) -> FieldMatrix {
    let f = params.field();
    let mut masks = FieldMatrix::zeros(f, params.collusion(), params.total_instances());
    for r in 0..masks.rows() {
        for c in 0..masks.cols() {
            masks.set(r, c, f.sample(rng));
        }
    }
    masks
}

/// The `(N - B) x (l + beta)` matrix whose encoding the servers jointly
/// serve: `T` mask-protected mixture rows on top, the retrieved message's
/// blocks below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadMatrix {
    mask_rows: usize,
    matrix: FieldMatrix,
}

impl PayloadMatrix {
    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn mask_rows(&self) -> usize {
        self.mask_rows
    }

    /// Wraps an already-solved candidate matrix.
    pub fn from_matrix(params: &SchemeParams, matrix: FieldMatrix) -> Result<Self, SchemeError> {
        if matrix.rows() != params.payload_rows() || matrix.cols() != params.total_instances() {
            return Err(SchemeError::ShapeMismatch(format!(
                "payload is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                params.payload_rows(),
                params.total_instances()
            )));
        }
        Ok(PayloadMatrix {
            mask_rows: params.collusion(),
            matrix,
        })
    }
}

/// Assembles the payload matrix for a retrieval of message `index`.
pub fn build_x_matrix(
    params: &SchemeParams,
    dataset: &Dataset,
    artifacts: &QueryArtifacts,
    masks: &FieldMatrix,
) -> Result<PayloadMatrix, SchemeError> {
    if dataset.message_count() != params.messages()
        || dataset.total_instances != params.total_instances()
        || dataset.block_len != params.block_len()
    {
        return Err(SchemeError::ShapeMismatch(
            "dataset does not match parameters".into(),
        ));
    }
    if masks.rows() != params.collusion() || masks.cols() != params.total_instances() {
        return Err(SchemeError::ShapeMismatch(format!(
            "masks are {}x{}, expected {}x{}",
            masks.rows(),
            masks.cols(),
            params.collusion(),
            params.total_instances()
        )));
    }
    if artifacts.index >= params.messages() {
        return Err(SchemeError::IndexOutOfRange {
            index: artifacts.index,
            messages: params.messages(),
        });
    }
    let f = params.field();
    let t = params.collusion();
    let mut x = FieldMatrix::zeros(f, params.payload_rows(), params.total_instances());
    for i in 0..params.total_instances() {
        let column = dataset.instance_column(i);
        for j in 0..t {
            let mixed = f.add(
                dot(f, artifacts.user_secret.row(j), &column),
                masks.get(j, i),
            );
            x.set(j, i, mixed);
        }
        let block = dataset.block(artifacts.index, i);
        for j in 0..params.block_len() {
            x.set(t + j, i, block[j]);
        }
    }
    Ok(PayloadMatrix {
        mask_rows: t,
        matrix: x,
    })
}

/// The `N x (l + beta)` answer matrix plus per-server corruption marks; fresh
/// answers are all honest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub answers: FieldMatrix,
    pub corrupted: Vec<bool>,
}

/// Honest answers: the combined encoder applied to the payload matrix.
pub fn generate_answers(params: &SchemeParams, payload: &PayloadMatrix) -> AnswerSet {
    let gens = build_generators(params);
    AnswerSet {
        answers: gens.combined.matmul(payload.matrix()),
        corrupted: vec![false; params.servers()],
    }
}

/// What one honest server computes for one instance from its own inputs: its
/// query row against the instance column, plus its evaluation-point powers
/// against the shared masks.
pub fn server_answer(
    params: &SchemeParams,
    server: usize,
    query_row: &[u64],
    instance_column: &[u64],
    mask_column: &[u64],
) -> u64 {
    let f = params.field();
    let point = params.eval_points()[server];
    let mut acc = dot(f, query_row, instance_column);
    let mut power = 1u64;
    for &mask in mask_column.iter().take(params.collusion()) {
        acc = f.add(acc, f.mul(power, mask));
        power = f.mul(power, point);
    }
    acc
}
