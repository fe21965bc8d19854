//! Seeded randomness.
//!
//! Every random object in the crate is drawn from a [`ChaCha8Rng`] built from a
//! 64-bit seed and a 64-bit stream index. Monte Carlo loops give trial `s` the
//! stream `s`, so results do not depend on worker count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies the generator and the way seeds are expanded. Reports carry it.
pub const GENERATOR_VERSION: &str = "rand_chacha-0.3/ChaCha8Rng seed_from_u64+stream v1";

pub type Rng = ChaCha8Rng;

/// Generator for the main stream of `seed`.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for an independent numbered stream of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_add(1));
    rng
}

/// Derives a child seed; used when one operation needs to hand a seed to another.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
