//! Seeded random streams. Each subsystem draws from its own stream derived
//! from the user seed, so adding draws in one place does not shift another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the seed bytes followed by the stream name.
pub fn derive_seed(seed: u64, stream: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(stream.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, name))
}
