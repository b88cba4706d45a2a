//! Deterministic random streams.
//!
//! Every stochastic consumer gets its own ChaCha stream keyed by a tuple of
//! integers (seed, stream label, time step, index, ...). Streams never share
//! state, so results do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream labels used by the episode loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Fire = 1,
    Sensing = 2,
    Filter = 3,
    Planner = 4,
    Controller = 5,
    Instance = 6,
    Init = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a key tuple into a single 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908u64, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream_rng(parts: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(parts))
}
