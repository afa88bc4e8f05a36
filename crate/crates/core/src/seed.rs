//! Seed derivation for independent random substreams.
//!
//! Every random consumer in the pipeline (a run, a grid cell, a document's
//! resampling draw) gets its own generator seeded from a parent seed and an
//! index, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `parent`.
///
/// For a fixed parent, distinct indices always give distinct seeds.
pub fn derive(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index))
}

/// Seed of a named child stream, for separating the purposes a single
/// seed is used for (resampling vs. training vs. tie-breaking).
pub fn derive_named(parent: u64, purpose: &str) -> u64 {
    let h = purpose
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    derive(parent, h)
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
