//! Per-trial randomness derivation.
//!
//! Every trial owns six independent ChaCha8 streams, one per protocol role,
//! so changing the adversary never perturbs the dataset and a single trial
//! can be replayed in isolation. The 32-byte seed is the little-endian
//! master seed, then the little-endian trial index, then zeros; the role
//! picks the stream number.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The six randomness roles of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamId {
    UserSecret = 0,
    Dataset = 1,
    Masks = 2,
    HashPoints = 3,
    Adversary = 4,
    Channel = 5,
}

/// The generator for one role of one trial.
pub fn trial_rng(master_seed: u64, trial: u64, stream: StreamId) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream as u64);
    rng
}
