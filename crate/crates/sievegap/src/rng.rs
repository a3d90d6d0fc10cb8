//! Seeded random streams.
//!
//! Every random choice in the crate is drawn from a ChaCha8 stream keyed by
//! the master seed, a domain tag and an index. Work items (one prime, one
//! trial, one edge index) each own a stream, so results do not depend on the
//! order in which items are processed or on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed used when neither a flag nor `SIEVEGAP_SEED` is given.
pub const DEFAULT_SEED: u64 = 0x5EED_6A95;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Independent stream for `(seed, tag, index)`.
pub fn stream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(fnv1a(tag)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Derive a child seed, used when one run spawns numbered sub-runs.
pub fn child_seed(seed: u64, tag: &str, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ fnv1a(tag)).wrapping_add(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, "x", 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream(7, "x", 3).gen()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ_by_tag_and_index() {
        let a: u64 = stream(7, "x", 3).gen();
        assert_ne!(a, stream(7, "y", 3).gen::<u64>());
        assert_ne!(a, stream(7, "x", 4).gen::<u64>());
        assert_ne!(a, stream(8, "x", 3).gen::<u64>());
    }
}
