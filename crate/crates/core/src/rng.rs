//! Seed derivation. Every stochastic step draws from its own ChaCha stream
//! keyed by `(seed, stream)`, so results never depend on call order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

pub(crate) mod streams {
    pub const USER_POSITIONS: u64 = 1;
    pub const USER_CLASSES: u64 = 2;
    pub const CHANNEL_PHASES: u64 = 3;
    pub const PAIRING: u64 = 4;
    pub const DROP: u64 = 0x100;
}
