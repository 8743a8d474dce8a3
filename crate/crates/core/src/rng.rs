//! Deterministic generator streams.
//!
//! Every random task (a Monte-Carlo replicate, a bootstrap draw, a split)
//! owns a ChaCha8 generator seeded from the user seed and a path of task
//! identifiers, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a seed with a path of identifiers into a 64-bit stream key.
pub fn stream_key(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &id| {
        splitmix64(acc ^ splitmix64(id.wrapping_add(0xA5A5_A5A5)))
    })
}

/// Generator for the task identified by `path` under `seed`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, path))
}

/// Well-known task labels used as the first path component.
pub mod label {
    pub const SPLIT: u64 = 1;
    pub const BOOTSTRAP: u64 = 2;
    pub const REPLICATE: u64 = 3;
    pub const PERMUTATION: u64 = 4;
    pub const SIGNS: u64 = 5;
    pub const DATA: u64 = 6;
}
