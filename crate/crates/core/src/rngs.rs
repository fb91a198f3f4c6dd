//! Counter-keyed random streams.
//!
//! Every independent unit of work (a Monte-Carlo trial, a chunk of noise
//! samples) gets its own ChaCha stream keyed by a tuple of integers, so
//! results never depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_TRIAL: u64 = 1;
pub(crate) const TAG_THEORY: u64 = 2;
pub(crate) const TAG_NOISE_CHUNK: u64 = 3;

/// Stream for the key `(seed, a, b, tag)`.
pub fn keyed_rng(seed: u64, a: u64, b: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (slot, word) in key.chunks_exact_mut(8).zip([seed, a, b, tag]) {
        slot.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
