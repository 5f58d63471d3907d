//! Per-page seed derivation and RNG streams.
//!
//! `page_seed = splitmix64(master_seed ^ page_index.wrapping_mul(PAGE_SEED_MULTIPLIER))`
//! where `splitmix64(x)` is one step of the SplitMix64 generator started at
//! state `x`:
//!
//! ```text
//! z = x + 0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping mod 2^64). Every step is a bijection on `u64`, so
//! distinct page indices under one master seed never collide.
//!
//! Each page seed drives ChaCha8 (`rand_chacha`, seeded with
//! `SeedableRng::seed_from_u64`): stream 0 for placement, stream 1 for label
//! noise, so turning noise on never changes the layout.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Odd multiplier spreading page indices before mixing.
pub const PAGE_SEED_MULTIPLIER: u64 = 0xD1B5_4A32_D192_ED03;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seed_derive(master_seed: u64, page_index: u64) -> u64 {
    splitmix64(master_seed ^ page_index.wrapping_mul(PAGE_SEED_MULTIPLIER))
}

pub const PLACEMENT_STREAM: u64 = 0;
pub const NOISE_STREAM: u64 = 1;

pub fn page_rng(page_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(page_seed);
    rng.set_stream(stream);
    rng
}
