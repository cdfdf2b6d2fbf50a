//! One end-to-end protocol run under a seeded adversary, with everything
//! recorded.

use crate::adversary::{AdversaryState, KnownPLeak, Strategy, StrategyKind};
use crate::channels::{
    answer_download_event, broadcast_send, query_upload_event, secret_send, ChannelEvent,
};
use crate::decoder::{decode, DecodeOutcome, DecodeStatus, HashCheckScope};
use crate::field::FieldMatrix;
use crate::hashing::{hash_rows, message_hashes, sample_hash_points, HashBundle};
use crate::params::{Model, SchemeParams};
use crate::scheme::{
    build_x_matrix, generate_answers, generate_queries, sample_masks, AnswerSet, Dataset,
    PayloadMatrix, QueryArtifacts,
};
use crate::sim::rng::{trial_rng, StreamId};
use serde::{Deserialize, Serialize};

/// How a finished trial counts toward the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// The requested message came back intact.
    Correct,
    /// A single wrong message came back.
    WrongMessage,
    /// The decoder could not separate multiple surviving messages.
    Ambiguous,
    /// No candidate survived the hash screen.
    NoCandidate,
    /// The broadcast carrying the hashes failed; counted as an error no
    /// matter how the decode went.
    Phase1Failure,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Correct => "correct",
            Classification::WrongMessage => "wrong_message",
            Classification::Ambiguous => "ambiguous",
            Classification::NoCandidate => "no_candidate",
            Classification::Phase1Failure => "phase1_failure",
        }
    }
}

/// Complete record of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTranscript {
    pub trial: u64,
    pub index: usize,
    pub dataset: Dataset,
    pub queries: QueryArtifacts,
    pub masks: FieldMatrix,
    pub payload: PayloadMatrix,
    pub clean: AnswerSet,
    pub tainted: AnswerSet,
    pub observed: Vec<usize>,
    pub targets: Vec<usize>,
    pub hash_points: Vec<u64>,
    pub bundle: HashBundle,
    pub hashes_delivered: bool,
    pub events: Vec<ChannelEvent>,
    pub outcome: DecodeOutcome,
    pub classification: Classification,
}

/// Runs trial number `trial` of an experiment: six derived randomness
/// streams, the honest protocol, the corruption, the decode, and the
/// classification.
pub fn run_trial(
    params: &SchemeParams,
    strategy: StrategyKind,
    index: usize,
    scope: HashCheckScope,
    master_seed: u64,
    trial: u64,
) -> TrialTranscript {
    let mut dataset_rng = trial_rng(master_seed, trial, StreamId::Dataset);
    let mut user_rng = trial_rng(master_seed, trial, StreamId::UserSecret);
    let mut masks_rng = trial_rng(master_seed, trial, StreamId::Masks);
    let mut hash_rng = trial_rng(master_seed, trial, StreamId::HashPoints);
    let mut adversary_rng = trial_rng(master_seed, trial, StreamId::Adversary);
    let mut channel_rng = trial_rng(master_seed, trial, StreamId::Channel);

    let dataset = Dataset::random(params, &mut dataset_rng);
    let queries = generate_queries(params, index, &mut user_rng).expect("validated index");
    let masks = sample_masks(params, &mut masks_rng);
    let payload =
        build_x_matrix(params, &dataset, &queries, &masks).expect("validated shapes");
    let clean = generate_answers(params, &payload);
    let hash_points = sample_hash_points(params.field(), params.hash_count(), &mut hash_rng);

    let mut events = vec![query_upload_event(params), answer_download_event(params)];
    let (bundle, hashes_delivered) = match params.model() {
        Model::SecretChannel => {
            let set: Vec<u64> = (0..params.payload_rows() as u64).collect();
            let (delivery, event) = secret_send(params, &payload, &set, &hash_points)
                .expect("validated hash setup");
            events.push(event);
            (delivery.bundle, true)
        }
        Model::Untouched { .. } => {
            let bundle = message_hashes(params, &dataset, &hash_points)
                .expect("validated hash setup");
            let outcome = broadcast_send(params, &bundle, &mut channel_rng);
            events.push(outcome.event);
            (bundle, outcome.delivered)
        }
    };

    let runtime_strategy = match strategy {
        StrategyKind::Passive => Strategy::Passive,
        StrategyKind::RandomOverwrite => Strategy::RandomOverwrite,
        StrategyKind::AdditiveNoise => Strategy::AdditiveNoise,
        StrategyKind::HashGuess => Strategy::HashGuess,
        StrategyKind::MaxRoots => Strategy::MaxRoots,
        StrategyKind::KnownPForgery => Strategy::KnownPForgery(KnownPLeak {
            points: hash_points.clone(),
            row_hashes: hash_rows(&clean.answers, &hash_points)
                .expect("validated hash setup"),
        }),
    };
    let adversary = AdversaryState::new(params, runtime_strategy, &mut adversary_rng);
    let view = adversary.build_view(&queries.queries, &clean);
    let targets = adversary.choose_targets(params, &mut adversary_rng);
    let tainted = adversary.corrupt(params, &view, &clean, &targets, &mut adversary_rng);

    let outcome =
        decode(params, index, &tainted, &bundle, scope).expect("validated bundle shapes");
    let classification = if !hashes_delivered {
        Classification::Phase1Failure
    } else {
        match &outcome.status {
            DecodeStatus::Decoded { message } => {
                if message == dataset.message_payload(index) {
                    Classification::Correct
                } else {
                    Classification::WrongMessage
                }
            }
            DecodeStatus::Ambiguous { .. } => Classification::Ambiguous,
            DecodeStatus::NoCandidate => Classification::NoCandidate,
        }
    };

    TrialTranscript {
        trial,
        index,
        dataset,
        queries,
        masks,
        payload,
        clean,
        tainted,
        observed: adversary.observed,
        targets,
        hash_points,
        bundle,
        hashes_delivered,
        events,
        outcome,
        classification,
    }
}
