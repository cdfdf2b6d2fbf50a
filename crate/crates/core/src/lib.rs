//! Byzantine-resilient symmetric private information retrieval over a prime
//! field, with the measurement harness used to validate it.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: exact F_q arithmetic and dense matrices.
//! - [`params`]: validated protocol parameters for both adversary models.
//! - [`scheme`]: query generation, the masked payload matrix, and answers.
//! - [`capacity`]: exact rational rate, threshold, and capacity figures.
//! - [`hashing`]: power-sum hashes, verification, and analytic error bounds.
//! - [`adversary`]: corruption strategies confined to each model's view.
//! - [`decoder`]: corruption-hypothesis enumeration and hash filtering.
//! - [`channels`]: secret-channel and broadcast delivery with cost accounting.
//! - [`audit`]: algebraic and exhaustive privacy checks.
//! - [`sim`]: seeded trials, Monte Carlo experiments, and report emission.

pub mod adversary;
pub mod audit;
pub mod capacity;
pub mod channels;
pub mod decoder;
pub mod field;
pub mod hashing;
pub mod params;
pub mod scheme;
pub mod sim;

pub use adversary::{AdversaryState, AdversaryView, Strategy, StrategyKind};
pub use capacity::{capacity, capacity_omniscient_zero_error, Accounting};
pub use channels::{BroadcastOutcome, ChannelEvent, SecretPayload};
pub use decoder::{CandidateSolution, DecodeOutcome, DecodeStatus, HashCheckScope};
pub use field::{Field, FieldError, FieldMatrix};
pub use hashing::{HashBundle, HashFlavor};
pub use params::{Model, ParamsError, SchemeParams, SchemeSpec};
pub use scheme::{AnswerSet, Dataset, Generators, PayloadMatrix, QueryArtifacts};
pub use sim::{
    Classification, ExperimentConfig, ExperimentReport, ReportFormat, TrialTranscript,
};
