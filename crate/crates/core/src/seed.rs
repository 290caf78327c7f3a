//! Deterministic seed derivation.
//!
//! Every random stream in the crate is derived from a user seed plus a
//! sequence of integer tags, so results never depend on thread scheduling or
//! evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a base seed with a tag into a new, well-mixed seed.
pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Folds a slice of tags into `seed` in order.
pub fn derive_path(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(seed, |s, &t| derive(s, t))
}

/// Hash of the exact bit patterns of a vector; identical inputs map to
/// identical seeds regardless of where they appear in a dataset.
pub fn hash_f64s(values: &[f64]) -> u64 {
    values
        .iter()
        .fold(0xcbf2_9ce4_8422_2325, |h, v| splitmix64(h ^ v.to_bits()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator seeded by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

// Stream tags, kept distinct so no two consumers ever share a stream.
pub(crate) mod tags {
    pub const INIT_DICTIONARY: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const INFER: u64 = 3;
    pub const PROBE: u64 = 4;
    pub const TUNE: u64 = 5;
    pub const PREDICT: u64 = 6;
    pub const PRETRAIN: u64 = 7;
    pub const TRAIN: u64 = 8;
}
