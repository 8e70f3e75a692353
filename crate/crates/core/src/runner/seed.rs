//! Seed derivation. Every random stream in the crate is keyed through
//! [`derive_seed`]; nothing reads a global entropy source.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// 64-bit FNV-1a hash of `bytes`.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// SplitMix64 output finalizer.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `(stream_label, index)` under `master`.
///
/// `mix(master ^ fnv1a64(label) ^ (index + 1) * 0x9E3779B97F4A7C15)` with
/// wrapping arithmetic, where `mix` is the SplitMix64 finalizer.
pub fn derive_seed(master: u64, stream_label: &str, index: u64) -> u64 {
    let salt = index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
    splitmix64_mix(master ^ fnv1a64(stream_label.as_bytes()) ^ salt)
}

/// The crate-wide generator, seeded from a derived seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
