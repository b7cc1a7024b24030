//! Deterministic seed derivation.
//!
//! Every randomized component takes a `u64` seed and expands it with a
//! fixed SplitMix64 step, so independent streams (splits, noise draws,
//! trainer restarts, benchmark trials) never share state and a single
//! base seed reproduces a whole experiment bit for bit.

/// Stream tags separating the independent consumers of a base seed.
pub mod streams {
    pub const SPLIT: u64 = 0x53504c49;
    pub const NOISE: u64 = 0x4e4f4953;
    pub const TRAINER: u64 = 0x5452414e;
    pub const TRIAL: u64 = 0x5452494c;
    pub const GEN: u64 = 0x47454e44;
}

/// SplitMix64 output function (Steele, Lea, Flood; public domain).
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives the seed for `(stream, index)` from a base seed.
pub fn derive(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ stream.wrapping_mul(0x9e3779b97f4a7c15)).wrapping_add(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_do_not_collide() {
        let a = derive(42, streams::SPLIT, 0);
        let b = derive(42, streams::NOISE, 0);
        let c = derive(42, streams::SPLIT, 1);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive(42, streams::SPLIT, 0));
    }
}
