//! Deterministic seed derivation.
//!
//! Every stochastic routine takes a master seed and derives one sub-seed per
//! unit of work (trial, stream). Units are independent and can run in
//! parallel while the overall result stays bit-identical for a fixed master
//! seed, regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The finalizer of splitmix64; a full-avalanche 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for work unit `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1)))
}

/// ChaCha RNG for work unit `index` under `master`. ChaCha is used (rather
/// than the standard RNG) because its output stream is stable across rand
/// versions and platforms.
pub fn unit_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index))
}
