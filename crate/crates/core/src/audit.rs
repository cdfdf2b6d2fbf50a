//! Privacy audits: an algebraic certificate for query privacy plus
//! exhaustive, exact-count audits of both privacy directions on small
//! parameter sets.
//!
//! The algebraic certificate checks that every size-`T` row subset of the
//! secret encoder is invertible, which makes any `T` colluding servers'
//! queries a one-time-pad image of the user's secret matrix. The exhaustive
//! audits do not trust that argument: they enumerate every assignment of the
//! protocol randomness, tally the exact joint distribution of what a party
//! observes, and compare. User privacy is measured as total variation
//! distance between retrievals of two different messages; database privacy as
//! mutual information between the user's view and the messages it did not
//! ask for. Both must come out exactly zero, integer count against integer
//! count, and the ablation variants break each guarantee on purpose to show
//! the audits can see a violation.

use crate::field::FieldMatrix;
use crate::hashing::{answer_hashes, hash_rows, message_hashes, HashError};
use crate::params::{Model, SchemeParams};
use crate::scheme::{
    build_generators, build_x_matrix, generate_answers, queries_for_secret, Dataset,
};
use itertools::Itertools;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("{states} states exceed the audit budget of {budget}")]
    BudgetExceeded { states: u128, budget: u128 },
    #[error("retrieval indices must differ")]
    SameIndex,
    #[error("message index {index} out of range for {messages} messages")]
    IndexOutOfRange { index: usize, messages: usize },
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Which mechanics the audited run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditVariant {
    /// The protocol as shipped.
    Faithful,
    /// Queries sent with a zeroed secret matrix; breaks user privacy.
    LeakyQueries,
    /// Servers answer with zeroed masks; breaks database privacy.
    UnmaskedMasks,
    /// Message hashes computed without the appended randomness; breaks
    /// database privacy under the broadcast.
    UnpaddedMessageHashes,
}

/// One audit setup: parameters, mechanics, and a state budget that caps the
/// enumeration before it starts.
#[derive(Debug, Clone)]
pub struct AuditInstance {
    pub params: SchemeParams,
    pub variant: AuditVariant,
    pub budget: u128,
}

impl AuditInstance {
    pub fn new(params: SchemeParams) -> Self {
        AuditInstance {
            params,
            variant: AuditVariant::Faithful,
            budget: 100_000_000,
        }
    }

    pub fn variant(mut self, variant: AuditVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// Result of the exhaustive user-privacy audit.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPrivacyAudit {
    /// Largest total variation distance over all colluding subsets.
    pub max_tv_distance: f64,
    /// Whether every subset's joint counts matched exactly.
    pub exact_zero: bool,
    /// The subset attaining the maximum.
    pub worst_subset: Vec<usize>,
    /// Enumerated states per retrieval index.
    pub states: u128,
}

/// Result of the exhaustive database-privacy audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DatabasePrivacyAudit {
    /// Mutual information between the unrequested messages and the user's
    /// view, in base-`q` units; zero when the counts factorize exactly.
    pub mutual_information_base_q: f64,
    /// Whether the independence held count-for-count.
    pub exact_zero: bool,
    /// Enumerated states.
    pub states: u128,
}

/// Checks that every size-`t` row subset of an `n x t` encoder is
/// invertible, returning the first offending subset otherwise.
pub fn certify_secret_rows(matrix: &FieldMatrix, t: usize) -> Result<(), Vec<usize>> {
    assert_eq!(matrix.cols(), t, "encoder must have one column per pad row");
    for subset in (0..matrix.rows()).combinations(t) {
        if matrix.select_rows(&subset).invert().is_err() {
            return Err(subset);
        }
    }
    Ok(())
}

/// The algebraic query-privacy certificate: any `T` servers' queries are
/// padded by an invertible image of the secret matrix.
pub fn certify_user_privacy_algebraic(params: &SchemeParams) -> Result<(), Vec<usize>> {
    let gens = build_generators(params);
    certify_secret_rows(&gens.secret, params.collusion())
}

/// Calls `f` with every length-`len` tuple over `0..q`.
fn for_each_assignment(q: u64, len: usize, mut f: impl FnMut(&[u64])) {
    let mut slots = vec![0u64; len];
    loop {
        f(&slots);
        let mut i = 0;
        while i < len {
            slots[i] += 1;
            if slots[i] < q {
                break;
            }
            slots[i] = 0;
            i += 1;
        }
        if i == len {
            break;
        }
    }
}

/// Ordered tuples of distinct nonzero hash points.
fn enumerate_point_tuples(q: u64, alpha: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(alpha);
    fn recurse(q: u64, alpha: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if current.len() == alpha {
            out.push(current.clone());
            return;
        }
        for p in 1..q {
            if !current.contains(&p) {
                current.push(p);
                recurse(q, alpha, current, out);
                current.pop();
            }
        }
    }
    recurse(q, alpha, &mut current, &mut out);
    out
}

struct StateLayout {
    secret_slots: usize,
    message_slots: usize,
    mask_slots: usize,
}

impl StateLayout {
    fn new(params: &SchemeParams, variant: AuditVariant) -> Self {
        let secret_slots = if variant == AuditVariant::LeakyQueries {
            0
        } else {
            params.collusion() * params.query_len()
        };
        let mask_slots = if variant == AuditVariant::UnmaskedMasks {
            0
        } else {
            params.collusion() * params.total_instances()
        };
        StateLayout {
            secret_slots,
            message_slots: params.messages() * params.stored_message_len(),
            mask_slots,
        }
    }

    fn total_slots(&self) -> usize {
        self.secret_slots + self.message_slots + self.mask_slots
    }

    fn states(&self, q: u64) -> u128 {
        let mut acc = 1u128;
        for _ in 0..self.total_slots() {
            acc = acc.saturating_mul(q as u128);
        }
        acc
    }

    fn user_secret(&self, params: &SchemeParams, slots: &[u64]) -> FieldMatrix {
        let mut u = FieldMatrix::zeros(params.field(), params.collusion(), params.query_len());
        if self.secret_slots > 0 {
            for r in 0..u.rows() {
                for c in 0..u.cols() {
                    u.set(r, c, slots[r * u.cols() + c]);
                }
            }
        }
        u
    }

    fn dataset(&self, params: &SchemeParams, slots: &[u64]) -> Dataset {
        let base = self.secret_slots;
        let per = params.stored_message_len();
        let messages = (0..params.messages())
            .map(|k| slots[base + k * per..base + (k + 1) * per].to_vec())
            .collect();
        Dataset::from_messages(params, messages).expect("enumerated symbols are canonical")
    }

    fn masks(&self, params: &SchemeParams, slots: &[u64]) -> FieldMatrix {
        let mut s = FieldMatrix::zeros(
            params.field(),
            params.collusion(),
            params.total_instances(),
        );
        if self.mask_slots > 0 {
            let base = self.secret_slots + self.message_slots;
            for r in 0..s.rows() {
                for c in 0..s.cols() {
                    s.set(r, c, slots[base + r * s.cols() + c]);
                }
            }
        }
        s
    }
}

/// Enumerates every assignment of the protocol randomness and compares the
/// exact joint distribution of `(queries, answers, store, masks)` seen by
/// each colluding subset across two retrieval indices.
pub fn audit_user_privacy_exhaustive(
    instance: &AuditInstance,
    k1: usize,
    k2: usize,
) -> Result<UserPrivacyAudit, AuditError> {
    let params = &instance.params;
    if k1 == k2 {
        return Err(AuditError::SameIndex);
    }
    for &k in &[k1, k2] {
        if k >= params.messages() {
            return Err(AuditError::IndexOutOfRange {
                index: k,
                messages: params.messages(),
            });
        }
    }
    let layout = StateLayout::new(params, instance.variant);
    let states = layout.states(params.field().modulus());
    if states > instance.budget {
        return Err(AuditError::BudgetExceeded {
            states,
            budget: instance.budget,
        });
    }
    let subsets: Vec<Vec<usize>> = (0..params.servers())
        .combinations(params.collusion())
        .collect();
    let mut counts: Vec<HashMap<Vec<u64>, [u64; 2]>> =
        subsets.iter().map(|_| HashMap::new()).collect();
    for_each_assignment(params.field().modulus(), layout.total_slots(), |slots| {
        let user_secret = layout.user_secret(params, slots);
        let dataset = layout.dataset(params, slots);
        let masks = layout.masks(params, slots);
        for (side, &k) in [k1, k2].iter().enumerate() {
            let art = queries_for_secret(params, k, &user_secret)
                .expect("audited index is in range");
            let payload = build_x_matrix(params, &dataset, &art, &masks)
                .expect("enumerated shapes are valid");
            let answers = generate_answers(params, &payload);
            for (i, subset) in subsets.iter().enumerate() {
                let mut key = Vec::new();
                for &s in subset {
                    key.extend_from_slice(art.queries.row(s));
                }
                for &s in subset {
                    key.extend_from_slice(answers.answers.row(s));
                }
                key.extend_from_slice(&slots[layout.secret_slots..]);
                counts[i].entry(key).or_default()[side] += 1;
            }
        }
    });
    let mut max_tv = 0.0f64;
    let mut worst = subsets[0].clone();
    let mut exact = true;
    for (i, map) in counts.iter().enumerate() {
        let mut diff = 0u128;
        for [a, b] in map.values() {
            diff += a.abs_diff(*b) as u128;
            if a != b {
                exact = false;
            }
        }
        let tv = diff as f64 / (2.0 * states as f64);
        if tv > max_tv {
            max_tv = tv;
            worst = subsets[i].clone();
        }
    }
    Ok(UserPrivacyAudit {
        max_tv_distance: max_tv,
        exact_zero: exact,
        worst_subset: worst,
        states,
    })
}

/// Hash values the user's view contains, per variant and model.
fn view_hashes(
    params: &SchemeParams,
    variant: AuditVariant,
    dataset: &Dataset,
    payload: &crate::scheme::PayloadMatrix,
    points: &[u64],
) -> Result<FieldMatrix, HashError> {
    if variant == AuditVariant::UnpaddedMessageHashes {
        let mut rows = FieldMatrix::zeros(
            params.field(),
            params.messages(),
            params.message_len(),
        );
        for k in 0..params.messages() {
            rows.set_row(k, dataset.message_payload(k));
        }
        return hash_rows(&rows, points);
    }
    match params.model() {
        Model::SecretChannel => {
            let set: Vec<u64> = (0..params.payload_rows() as u64).collect();
            Ok(answer_hashes(params, payload, &set, points)?.values)
        }
        Model::Untouched { .. } => Ok(message_hashes(params, dataset, points)?.values),
    }
}

/// Enumerates every assignment of the store, the masks, the user secret, and
/// the hash points, and tests exact independence between the messages the
/// user did not request and everything the user sees.
pub fn audit_database_privacy_exhaustive(
    instance: &AuditInstance,
    index: usize,
) -> Result<DatabasePrivacyAudit, AuditError> {
    let params = &instance.params;
    if index >= params.messages() {
        return Err(AuditError::IndexOutOfRange {
            index,
            messages: params.messages(),
        });
    }
    let layout = StateLayout::new(params, instance.variant);
    let tuples = enumerate_point_tuples(params.field().modulus(), params.hash_count());
    let states = layout
        .states(params.field().modulus())
        .saturating_mul(tuples.len() as u128);
    if states > instance.budget {
        return Err(AuditError::BudgetExceeded {
            states,
            budget: instance.budget,
        });
    }
    let mut joint: HashMap<(Vec<u64>, Vec<u64>), u64> = HashMap::new();
    let mut secret_marginal: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut view_marginal: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut failed: Option<HashError> = None;
    for_each_assignment(params.field().modulus(), layout.total_slots(), |slots| {
        if failed.is_some() {
            return;
        }
        let user_secret = layout.user_secret(params, slots);
        let dataset = layout.dataset(params, slots);
        let masks = layout.masks(params, slots);
        let art = queries_for_secret(params, index, &user_secret)
            .expect("audited index is in range");
        let payload = build_x_matrix(params, &dataset, &art, &masks)
            .expect("enumerated shapes are valid");
        let answers = generate_answers(params, &payload);
        let mut secret_key = Vec::new();
        for k in 0..params.messages() {
            if k != index {
                secret_key.extend_from_slice(dataset.message_payload(k));
            }
        }
        for points in &tuples {
            let hashes =
                match view_hashes(params, instance.variant, &dataset, &payload, points) {
                    Ok(h) => h,
                    Err(e) => {
                        failed = Some(e);
                        return;
                    }
                };
            let mut view_key = Vec::new();
            for r in 0..user_secret.rows() {
                view_key.extend_from_slice(user_secret.row(r));
            }
            for r in 0..answers.answers.rows() {
                view_key.extend_from_slice(answers.answers.row(r));
            }
            view_key.extend_from_slice(points);
            for r in 0..hashes.rows() {
                view_key.extend_from_slice(hashes.row(r));
            }
            *joint
                .entry((secret_key.clone(), view_key.clone()))
                .or_default() += 1;
            *secret_marginal.entry(secret_key.clone()).or_default() += 1;
            *view_marginal.entry(view_key).or_default() += 1;
        }
    });
    if let Some(e) = failed {
        return Err(AuditError::Hash(e));
    }
    let total = states;
    let mut exact = true;
    for ((s, v), &n) in &joint {
        let ns = secret_marginal[s] as u128;
        let nv = view_marginal[v] as u128;
        if (n as u128) * total != ns * nv {
            exact = false;
            break;
        }
    }
    let mi = if exact {
        0.0
    } else {
        let totalf = total as f64;
        let logq = (params.field().modulus() as f64).ln();
        joint
            .iter()
            .map(|((s, v), &n)| {
                let p = n as f64 / totalf;
                let ps = secret_marginal[s] as f64 / totalf;
                let pv = view_marginal[v] as f64 / totalf;
                p * ((p / (ps * pv)).ln() / logq)
            })
            .sum()
    };
    Ok(DatabasePrivacyAudit {
        mutual_information_base_q: mi,
        exact_zero: exact,
        states,
    })
}
