//! Seeded random streams keyed by position in the chain, so every update
//! draws from its own stream no matter how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent ChaCha stream for `(seed, tags...)`.
pub fn substream(seed: u64, tags: &[u64]) -> StreamRng {
    let mut state = splitmix64(seed);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t.wrapping_add(0x5851_F42D_4C95_7F2D)));
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_mut(8).enumerate() {
        let w = splitmix64(state.wrapping_add((i as u64).wrapping_mul(GOLDEN)));
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Seed of the `index`-th child chain of `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xA076_1D64_78BD_642F))
}

pub(crate) mod tag {
    pub const LABELS: u64 = 1;
    pub const MEANS: u64 = 2;
    pub const TAU: u64 = 3;
    pub const PCN: u64 = 4;
    pub const BETA: u64 = 5;
}
