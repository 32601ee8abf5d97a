//! Deterministic seed derivation for independent random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// One step of the splitmix64 sequence.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `index` under `base`.
///
/// Streams with different indices are decorrelated; the mapping is a pure
/// function so the same `(base, index)` always yields the same stream.
pub fn derive(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng_from(base: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive(base, index))
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
