//! Delivery of the hash material and the cost ledger of a retrieval.
//!
//! Secret-channel runs hand the hash points and per-server answer hashes to
//! the user over adversary-invisible point-to-point links, `alpha (N - B + 1)`
//! symbols in total. Untouched runs push the points and the message-level
//! hashes through an authenticated broadcast that costs `N^2 (N - E)`
//! downloaded symbols per bit and fails outright with probability `N / q^N`,
//! the event the experiment harness classifies separately.

use crate::capacity::bits_per_symbol;
use crate::hashing::{answer_hashes, HashBundle, HashError};
use crate::params::{Model, SchemeParams};
use crate::scheme::PayloadMatrix;
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// One priced transfer in a protocol run. Symbol counts for the broadcast are
/// the downloaded-symbol equivalent of its bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelEvent {
    QueryUpload { symbols: u64 },
    AnswerDownload { symbols: u64 },
    SecretDelivery { symbols: u64 },
    BroadcastDelivery { symbols: u64, delivered: bool },
}

impl ChannelEvent {
    pub fn symbols(&self) -> u64 {
        match self {
            ChannelEvent::QueryUpload { symbols }
            | ChannelEvent::AnswerDownload { symbols }
            | ChannelEvent::SecretDelivery { symbols }
            | ChannelEvent::BroadcastDelivery { symbols, .. } => *symbols,
        }
    }
}

/// The upload of one query row to each server.
pub fn query_upload_event(params: &SchemeParams) -> ChannelEvent {
    ChannelEvent::QueryUpload {
        symbols: (params.servers() * params.query_len()) as u64,
    }
}

/// The download of every server's answer row.
pub fn answer_download_event(params: &SchemeParams) -> ChannelEvent {
    ChannelEvent::AnswerDownload {
        symbols: (params.servers() * params.total_instances()) as u64,
    }
}

/// What arrives over the secret channels: who sent the points, who sent each
/// hash row, and the assembled bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretPayload {
    pub points: Vec<u64>,
    /// Server that delivered the exponent points.
    pub point_sender: usize,
    /// Server that delivered each committed hash row, in bundle row order.
    pub hash_senders: Vec<usize>,
    pub bundle: HashBundle,
}

/// Builds the answer-level bundle for `server_set` and prices its delivery:
/// the first listed server sends the points, every listed server sends the
/// hash row of its own answer.
pub fn secret_send(
    params: &SchemeParams,
    payload: &PayloadMatrix,
    server_set: &[u64],
    points: &[u64],
) -> Result<(SecretPayload, ChannelEvent), HashError> {
    let bundle = answer_hashes(params, payload, server_set, points)?;
    let senders: Vec<usize> = server_set.iter().map(|&s| s as usize).collect();
    let alpha = params.hash_count() as u64;
    let symbols = alpha * (senders.len() as u64 + 1);
    Ok((
        SecretPayload {
            points: points.to_vec(),
            point_sender: senders[0],
            hash_senders: senders,
            bundle,
        },
        ChannelEvent::SecretDelivery { symbols },
    ))
}

/// Probability that the authenticated broadcast fails to deliver: `N / q^N`.
pub fn phase1_failure_probability(params: &SchemeParams) -> f64 {
    let n = params.servers() as f64;
    n / (params.field().modulus() as f64).powi(params.servers() as i32)
}

/// The result of one broadcast attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BroadcastOutcome {
    pub delivered: bool,
    pub event: ChannelEvent,
}

/// Prices and runs the broadcast of the points plus the message-level
/// hashes, flipping the failure coin on the given stream.
pub fn broadcast_send(
    params: &SchemeParams,
    bundle: &HashBundle,
    rng: &mut dyn RngCore,
) -> BroadcastOutcome {
    let Model::Untouched { observed } = params.model() else {
        panic!("broadcast delivery belongs to the untouched-server model");
    };
    let n = params.servers() as u64;
    let alpha = params.hash_count() as u64;
    debug_assert_eq!(bundle.points.len(), params.hash_count());
    let payload_symbols = (params.messages() as u64 + 1) * alpha;
    let symbols = n * n * (n - observed as u64)
        * payload_symbols
        * bits_per_symbol(params.field().modulus());
    let failure = phase1_failure_probability(params);
    let threshold = (failure * u64::MAX as f64) as u64;
    let delivered = rng.next_u64() >= threshold;
    BroadcastOutcome {
        delivered,
        event: ChannelEvent::BroadcastDelivery { symbols, delivered },
    }
}
