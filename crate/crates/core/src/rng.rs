//! Deterministic RNG streams from a single 64-bit seed.
//!
//! All randomness in the crate flows from one master seed, fanned out through
//! the ChaCha stream counter: stream `i` is an independent cipher stream of
//! the same keyed generator, so per-agent randomness does not depend on how
//! many agents exist or in what order they draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for the arrival process inside an episode.
pub const ARRIVALS_STREAM: u64 = 0;

/// Stream id for the entry-state draws of agent `index`.
pub fn agent_stream(index: usize) -> u64 {
    1 + index as u64
}

/// An independent generator for (`seed`, `stream`).
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a fresh 64-bit sub-seed, e.g. one per episode (splitmix64 step).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
