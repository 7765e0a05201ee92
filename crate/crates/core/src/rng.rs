//! Seeded random streams.
//!
//! Replicate `i` of a run with seed `s` uses a ChaCha8 stream keyed by
//! `splitmix64(s ^ splitmix64(i))`, so results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type GwRng = ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_from_seed(seed: u64) -> GwRng {
    GwRng::seed_from_u64(seed)
}

pub fn replicate_rng(seed: u64, index: u64) -> GwRng {
    rng_from_seed(derive_seed(seed, index))
}
