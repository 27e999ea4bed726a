//! Named, reproducible RNG substreams.
//!
//! Every (partition, randomness-category) pair owns an independent ChaCha12
//! stream derived from the master seed by a fixed mixing rule, so simulation
//! results depend only on the seed and the partition count, never on how
//! partitions are scheduled across worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Randomness categories, one substream each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Category {
    Bits = 0,
    ThCodes = 1,
    Polarity = 2,
    TxJitter = 3,
    Offsets = 4,
    TemplateJitter = 5,
    Noise = 6,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function; a strong enough mixer for seed derivation.
pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one (partition, category) pair.
pub(crate) fn stream(master_seed: u64, partition: u64, category: Category) -> ChaCha12Rng {
    let s = splitmix64(master_seed);
    let s = splitmix64(s ^ partition.wrapping_mul(GOLDEN).wrapping_add(1));
    let s = splitmix64(s ^ (category as u64).wrapping_mul(GOLDEN).wrapping_add(1));
    ChaCha12Rng::seed_from_u64(s)
}
