//! Deterministic random numbers.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`] seeded through
//! [`SeedableRng::seed_from_u64`], whose output stream is fixed by the
//! `rand_chacha` crate across platforms and releases. Experiments never share a
//! generator between jobs; instead each job derives its own seed from the
//! master seed with [`derive_seed`], so results do not depend on scheduling.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Seed roles used when deriving per-trial seeds.
pub mod role {
    pub const ADJACENCY: u64 = 1;
    pub const INPUT_WEIGHTS: u64 = 2;
    pub const NOISE: u64 = 3;
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a master seed together with an ordered list of identifiers
/// (trial index, role, retry counter, ...) into an independent seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` draws from U(-1, 1).
pub fn uniform_symmetric(rng: &mut ChaCha8Rng, n: usize) -> alloc::vec::Vec<f64> {
    let dist = Uniform::new_inclusive(-1.0_f64, 1.0).expect("valid bounds");
    (0..n).map(|_| dist.sample(rng)).collect()
}
