//! Seed derivation for per-record and per-purpose random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a mixed 64-bit value, so the
//! stream a record sees depends only on `(seed, purpose, index)` and never on
//! which worker thread processes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Domain separation between the streams derived from one user seed.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Purpose {
    Shuffle = 0x5348_5546_464c_4531,
    PairRight = 0x5041_4952_5249_4748,
    Record = 0x5245_434f_5244_0001,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, purpose: Purpose, index: u64) -> u64 {
    mix64(mix64(seed ^ purpose as u64) ^ mix64(index))
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(derive(seed, purpose, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_separated() {
        let a: u64 = stream(7, Purpose::Record, 3).random();
        let b: u64 = stream(7, Purpose::Record, 3).random();
        assert_eq!(a, b);
        assert_ne!(derive(7, Purpose::Record, 3), derive(7, Purpose::Record, 4));
        assert_ne!(
            derive(7, Purpose::Record, 3),
            derive(7, Purpose::Shuffle, 3)
        );
        assert_ne!(derive(7, Purpose::Record, 3), derive(8, Purpose::Record, 3));
    }
}
