//! Per-trial random streams.
//!
//! Each `(master_seed, substream)` pair keys a ChaCha8 generator and the trial
//! index selects its stream, so any trial can be regenerated in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random sources used within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    PbPoints = 0,
    SnPoints = 1,
    Orientations = 2,
    TieBreak = 3,
}

pub fn trial_stream(master_seed: u64, trial_index: u64, substream: Substream) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&(substream as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(trial_index);
    rng
}
