//! Seeded random streams.
//!
//! Every stochastic step draws from a ChaCha8 stream whose seed is derived
//! from the experiment seed plus a purpose tag and an index, so independent
//! consumers (per-pair listener coins, S0 picks, training shuffles) never
//! share state and results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purpose tags for derived streams.
pub mod stream {
    pub const DATASET: u64 = 0x01;
    pub const TRAIN: u64 = 0x02;
    pub const VALIDATION: u64 = 0x03;
    pub const LISTENER: u64 = 0x04;
    pub const LITERAL: u64 = 0x05;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for `(seed, tag, index)`.
pub fn derived(seed: u64, tag: u64, index: u64) -> SimRng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ tag) ^ index);
    ChaCha8Rng::seed_from_u64(mixed)
}
