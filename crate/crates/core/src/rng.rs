//! Seeded, splittable random streams.
//!
//! Every consumer draws from a ChaCha8 stream keyed by the master seed and a
//! fixed stream id, so adding draws in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const SAMPLING_STREAM: u64 = 1;
/// Initial points of the multi-start optimizer for layer count `p` use
/// stream `START_STREAM_BASE + p`.
pub(crate) const START_STREAM_BASE: u64 = 1 << 16;
/// Shot-estimated objectives key their seed on the evaluated angles and
/// draw from this stream.
pub(crate) const SHOT_OBJECTIVE_STREAM: u64 = 1 << 32;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Derives an independent 64-bit seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
