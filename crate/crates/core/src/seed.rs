//! Seed derivation. Every random decision in the engine flows from a master
//! seed through these mixers, so a frame can be reproduced in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mix a parent seed with a stream index and a domain tag.
pub fn derive(parent: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent ^ splitmix64(tag)) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Deterministic RNG for a derived stream.
pub fn rng(parent: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(parent, tag, index))
}

/// Domain tags keep independent streams from colliding.
pub mod tags {
    pub const FRAME: u64 = 0x4652_414d;
    pub const CHARACTER: u64 = 0x4348_4152;
    pub const SHAPE: u64 = 0x5348_4150;
    pub const SPLIT: u64 = 0x5350_4c54;
    pub const MOSAIC: u64 = 0x4d4f_5341;
    pub const GREEN: u64 = 0x4752_454e;
    pub const COMPOSITE: u64 = 0x434f_4d50;
    pub const PALETTE: u64 = 0x5041_4c45;
}
