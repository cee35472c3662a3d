//! Per-qubit random streams.
//!
//! Every qubit gets its own generator, seeded with
//! `mix(master, index) = splitmix64(master + (index + 1) · 0x9E3779B97F4A7C15)`,
//! i.e. the `index + 1`-th output of a SplitMix64 sequence started at the
//! master seed. The generator itself is ChaCha8. Because no stream is shared
//! between qubits, results do not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream for trial `index` under `master`.
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Generator for trial `index`.
pub fn qubit_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master, index))
}
