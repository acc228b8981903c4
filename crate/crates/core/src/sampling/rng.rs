//! Counter-based random streams.
//!
//! A stream is a ChaCha8 keystream. The 256-bit key is expanded from the
//! 64-bit seed with SplitMix64 and the ChaCha stream word is the stream id,
//! so `(seed, stream_id, counter)` pins every draw on every platform.

use num_complex::Complex64 as C64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    core: ChaCha8Rng,
    spare_gaussian: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        let mut core = ChaCha8Rng::from_seed(key);
        core.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            core,
            spare_gaussian: None,
        }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Position in the keystream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.core.get_word_pos()
    }

    /// Fresh stream derived from this stream's identity (not its position).
    ///
    /// For a fixed parent the map `index -> stream_id` is a bijection, so
    /// distinct indices never share a stream.
    pub fn substream(&self, index: u64) -> Self {
        let parent = mix64(self.stream_id.wrapping_add(GOLDEN_GAMMA));
        let child = mix64(parent ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
        Self::new(self.seed, child)
    }

    /// New independent root stream keyed by the next draw of this one. Used
    /// to hand a parallel job its own substream family while advancing `self`.
    pub fn fork(&mut self) -> Self {
        let id = self.next_u64();
        Self::new(self.seed, id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.core.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    /// Standard normal via Box–Muller; the second variate of each pair is cached.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        let radius = (-2.0 * self.uniform_open().ln()).sqrt();
        let angle = std::f64::consts::TAU * self.uniform();
        self.spare_gaussian = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gaussian() * s, self.gaussian() * s)
    }

    /// Uniform integer in `0..n` (unbiased, by rejection).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (a bijection on u64).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parses a seed written in decimal or as `0x`-prefixed hex.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text.trim();
    let parsed = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        t.parse::<u64>()
    };
    parsed.map_err(|e| Error::param(format!("bad seed {text:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn same_identity_same_draws() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_eq!(a.counter(), 200);
    }

    #[test]
    fn substreams_differ_and_replay() {
        let root = RngStream::from_seed(1);
        let mut s0 = root.substream(0);
        let mut s1 = root.substream(1);
        let a: Vec<u64> = (0..8).map(|_| s0.next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|_| s1.next_u64()).collect();
        assert_ne!(a, b);
        let mut again = RngStream::from_seed(1).substream(0);
        let c: Vec<u64> = (0..8).map(|_| again.next_u64()).collect();
        assert_eq!(a, c);
    }

    #[test]
    fn thousand_substreams_have_distinct_first_draws() {
        let root = RngStream::from_seed(0xDEAD_BEEF);
        let firsts: HashSet<u64> = (0..1000).map(|i| root.substream(i).next_u64()).collect();
        assert_eq!(firsts.len(), 1000);
    }

    #[test]
    fn substream_ignores_parent_position() {
        let root = RngStream::from_seed(3);
        let mut advanced = root.clone();
        advanced.next_u64();
        assert_eq!(
            root.substream(5).next_u64(),
            advanced.substream(5).next_u64()
        );
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0xff").unwrap(), 255);
        assert_eq!(parse_seed("0XFFFFFFFFFFFFFFFF").unwrap(), u64::MAX);
        assert!(parse_seed("-1").is_err());
        assert!(parse_seed("0xg").is_err());
    }

    #[test]
    fn uniform_ranges() {
        let mut r = RngStream::from_seed(9);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let o = r.uniform_open();
            assert!(o > 0.0 && o < 1.0);
            assert!(r.below(3) < 3);
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut r = RngStream::from_seed(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| r.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }
}
