//! List decoding of tainted answers by corruption-hypothesis enumeration.
//!
//! For every size-`B` server subset the decoder solves the square system that
//! attributes all disagreement to exactly those servers, recovering a
//! candidate payload matrix and the noise rows that hypothesis charges to
//! them. The system matrix appends one unit column per suspected server to
//! the combined encoder and is invertible for every subset, so enumeration
//! never gets stuck. Candidates are then screened against the committed
//! hashes; with a consistent bundle the truthful hypothesis always survives,
//! so the decoder either pins down the retrieved message or reports an
//! ambiguity, and a wrong message can only be released if the commitment
//! itself was corrupted.

use crate::field::FieldMatrix;
use crate::hashing::{hash_rows, payload_row_hashes, HashBundle, HashError, HashFlavor};
use crate::params::SchemeParams;
use crate::scheme::{build_generators, AnswerSet};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

/// One corruption hypothesis and the solution it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSolution {
    /// Suspected servers, sorted ascending, size `B`.
    pub hypothesis: Vec<usize>,
    /// The payload matrix this hypothesis reconstructs.
    pub payload: FieldMatrix,
    /// The `B x (l + beta)` noise rows charged to the suspected servers.
    pub noise: FieldMatrix,
}

/// Which payload rows the hash screen compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashCheckScope {
    /// Mask rows and message rows both.
    AllRows,
    /// Message rows only; mask rows pass unchecked.
    MessageRowsOnly,
}

/// Final verdict of a decode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    /// Exactly one retrieved message survived the screen.
    Decoded { message: Vec<u64> },
    /// Multiple inconsistent messages survived; the surviving hypotheses are
    /// listed in enumeration order.
    Ambiguous { hypotheses: Vec<Vec<usize>> },
    /// Nothing survived, which indicts the commitment, not the servers.
    NoCandidate,
}

/// A decode verdict plus screening statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Hypotheses whose candidate survived the hash screen.
    pub passing_hypotheses: usize,
    /// Distinct reconstructed stored messages among the survivors.
    pub distinct_messages: usize,
}

/// The unit columns charging disagreement to `servers`.
fn unit_columns(params: &SchemeParams, servers: &[usize]) -> FieldMatrix {
    let mut cols = FieldMatrix::zeros(params.field(), params.servers(), servers.len());
    for (j, &s) in servers.iter().enumerate() {
        cols.set(s, j, 1);
    }
    cols
}

/// Solves every corruption hypothesis against the tainted answers.
pub fn enumerate_candidates(params: &SchemeParams, tainted: &AnswerSet) -> Vec<CandidateSolution> {
    let gens = build_generators(params);
    let rows = params.payload_rows();
    (0..params.servers())
        .combinations(params.byzantine())
        .map(|hypothesis| {
            let system = gens.combined.hstack(&unit_columns(params, &hypothesis));
            let solution = system
                .solve(&tainted.answers)
                .expect("every hypothesis system is invertible");
            let payload = solution.select_rows(&(0..rows).collect::<Vec<_>>());
            let noise = solution.select_rows(&(rows..rows + hypothesis.len()).collect::<Vec<_>>());
            CandidateSolution {
                hypothesis,
                payload,
                noise,
            }
        })
        .collect()
}

/// Flattens a candidate payload's message rows into the stored message they
/// claim, padding instances included.
pub fn extract_stored_message(params: &SchemeParams, payload: &FieldMatrix) -> Vec<u64> {
    let t = params.collusion();
    let mut out = Vec::with_capacity(params.stored_message_len());
    for i in 0..params.total_instances() {
        for j in 0..params.block_len() {
            out.push(payload.get(t + j, i));
        }
    }
    out
}

/// The retrievable prefix of [`extract_stored_message`], padding stripped.
pub fn extract_message_payload(params: &SchemeParams, payload: &FieldMatrix) -> Vec<u64> {
    let mut full = extract_stored_message(params, payload);
    full.truncate(params.message_len());
    full
}

/// Screens candidates against the committed hashes. Answer-level bundles are
/// unmixed into per-payload-row hashes and compared row by row under the
/// given scope; message-level bundles compare the claimed stored message of
/// `index` against its committed hash row.
pub fn filter_by_hashes(
    params: &SchemeParams,
    index: usize,
    candidates: &[CandidateSolution],
    bundle: &HashBundle,
    scope: HashCheckScope,
) -> Result<Vec<CandidateSolution>, HashError> {
    let survivors = match &bundle.flavor {
        HashFlavor::AnswerLevel { .. } => {
            let expected = payload_row_hashes(params, bundle)?;
            let first_row = match scope {
                HashCheckScope::AllRows => 0,
                HashCheckScope::MessageRowsOnly => params.collusion(),
            };
            let mut kept = Vec::new();
            for cand in candidates {
                let got = hash_rows(&cand.payload, &bundle.points)?;
                let ok = (first_row..params.payload_rows())
                    .all(|r| got.row(r) == expected.row(r));
                if ok {
                    kept.push(cand.clone());
                }
            }
            kept
        }
        HashFlavor::MessageLevel => {
            let mut kept = Vec::new();
            for cand in candidates {
                let claimed = extract_stored_message(params, &cand.payload);
                let rows = FieldMatrix::from_rows(params.field(), &[claimed]);
                let got = hash_rows(&rows, &bundle.points)?;
                if got.row(0) == bundle.values.row(index) {
                    kept.push(cand.clone());
                }
            }
            kept
        }
    };
    Ok(survivors)
}

/// Reduces the surviving candidates to a verdict, collapsing survivors that
/// agree on the stored message.
pub fn resolve(params: &SchemeParams, survivors: &[CandidateSolution]) -> DecodeOutcome {
    let mut distinct: Vec<Vec<u64>> = Vec::new();
    for cand in survivors {
        let msg = extract_stored_message(params, &cand.payload);
        if !distinct.contains(&msg) {
            distinct.push(msg);
        }
    }
    let distinct_messages = distinct.len();
    let status = match distinct_messages {
        0 => DecodeStatus::NoCandidate,
        1 => {
            let mut message = distinct.into_iter().next().unwrap();
            message.truncate(params.message_len());
            DecodeStatus::Decoded { message }
        }
        _ => DecodeStatus::Ambiguous {
            hypotheses: survivors.iter().map(|c| c.hypothesis.clone()).collect(),
        },
    };
    DecodeOutcome {
        status,
        passing_hypotheses: survivors.len(),
        distinct_messages,
    }
}

/// Full decode: enumerate, screen, resolve.
pub fn decode(
    params: &SchemeParams,
    index: usize,
    tainted: &AnswerSet,
    bundle: &HashBundle,
    scope: HashCheckScope,
) -> Result<DecodeOutcome, HashError> {
    let candidates = enumerate_candidates(params, tainted);
    let survivors = filter_by_hashes(params, index, &candidates, bundle, scope)?;
    Ok(resolve(params, &survivors))
}
