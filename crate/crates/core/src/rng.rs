//! Seed derivation and independent random streams.
//!
//! An episode owns one root seed. Every consumer of randomness (type
//! sampling, the environment, each controller) draws from its own ChaCha
//! stream so that changing one controller never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const TYPE_STREAM: u64 = 1;
pub const ENV_STREAM: u64 = 2;
pub const SCHEDULE_STREAM: u64 = 3;
/// Draw of the type distribution for an episode.
pub const DRAW_STREAM: u64 = 4;
/// Random initial state.
pub const INIT_STREAM: u64 = 5;
const PLAYER_STREAM_BASE: u64 = 16;

/// Stream `id` of the generator rooted at `seed`.
pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn player_stream(seed: u64, player: usize) -> StreamRng {
    stream(seed, PLAYER_STREAM_BASE + player as u64)
}

/// SplitMix64 step, used to derive per-episode seeds from a root seed.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
