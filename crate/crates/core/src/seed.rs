//! Seed derivation for reproducible, order-independent Monte Carlo trials.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep the random streams of a trial independent of each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Pilot1 = 1,
    Pilot2 = 2,
    Data1 = 3,
    Data2 = 4,
    Noise = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with an ordered list of indices into a new 64-bit seed.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// ChaCha8 generator for `(base, path)`. ChaCha output is stable across
/// platforms and crate versions, which `StdRng` does not promise.
pub fn rng(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_deterministic_and_path_sensitive() {
        assert_eq!(derive(7, &[1, 2]), derive(7, &[1, 2]));
        assert_ne!(derive(7, &[1, 2]), derive(7, &[2, 1]));
        assert_ne!(derive(7, &[1]), derive(8, &[1]));
        let a: u64 = rng(3, &[0, 0]).random();
        let b: u64 = rng(3, &[0, 0]).random();
        assert_eq!(a, b);
    }
}
