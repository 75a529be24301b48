//! Counter-based random numbers keyed by `(seed, chain, block)`.
//!
//! Output `n` of a stream is a pure function of the key and `n`, so any
//! stretch of randomness can be regenerated without storing it.

use rand_core::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random seed of an experiment.
pub type Seed = u64;

/// SplitMix64 evaluated at an explicit counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: Seed, chain: u64, block: u64) -> Self {
        let key = mix64(seed ^ mix64(chain.wrapping_add(GOLDEN) ^ mix64(block.wrapping_mul(GOLDEN).wrapping_add(1))));
        CounterRng { key, counter: 0 }
    }

    /// Stream for `(seed, chain)` with block 0.
    pub fn for_chain(seed: Seed, chain: u64) -> Self {
        Self::new(seed, chain, 0)
    }

    /// Number of 64-bit words drawn so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    pub fn seek(&mut self, position: u64) {
        self.counter = position;
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_word() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.next_word()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let w = self.next_word().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seek_replays_the_stream() {
        let mut a = CounterRng::new(7, 3, 2);
        let first: Vec<u64> = (0..10).map(|_| a.next_u64()).collect();
        a.seek(4);
        assert_eq!(a.next_u64(), first[4]);
    }

    #[test]
    fn keys_separate_streams() {
        let words = |s, c, b| CounterRng::new(s, c, b).next_u64();
        assert_ne!(words(1, 0, 0), words(2, 0, 0));
        assert_ne!(words(1, 0, 0), words(1, 1, 0));
        assert_ne!(words(1, 0, 0), words(1, 0, 1));
        assert_ne!(words(0, 1, 0), words(0, 0, 1));
    }

    #[test]
    fn bits_are_balanced() {
        let mut r = CounterRng::for_chain(42, 0);
        let n = 20_000;
        let ones: u32 = (0..n).map(|_| r.next_u64().count_ones()).sum();
        let frac = f64::from(ones) / (64.0 * f64::from(n));
        assert!((frac - 0.5).abs() < 0.005, "{frac}");
    }

    #[test]
    fn fill_bytes_handles_partial_words() {
        let mut a = CounterRng::for_chain(1, 1);
        let mut b = a.clone();
        let mut buf = [0u8; 11];
        a.fill_bytes(&mut buf);
        assert_eq!(&buf[..8], &b.next_u64().to_le_bytes());
        assert_eq!(&buf[8..], &b.next_u64().to_le_bytes()[..3]);
    }
}
