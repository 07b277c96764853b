//! Seeded generator helpers.
//!
//! Every random draw in the crate goes through a [`ChaCha8Rng`] built here,
//! either from a plain seed or from a (seed, stream) pair. Streams give each
//! sweep row or Monte Carlo draw its own independent sequence, so results do
//! not depend on evaluation order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed for item `index` of a run seeded with `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    stream(seed, index).next_u64()
}
