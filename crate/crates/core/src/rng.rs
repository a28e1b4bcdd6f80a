//! Keyed random streams.
//!
//! Every stream in a simulation is addressed by `(base_seed, rep, arm, purpose)`.
//! The first two components seed a ChaCha8 key, the last two select the
//! ChaCha stream id, so streams are counter-based and independent of the
//! order in which they are created. Adding a new purpose never shifts the
//! draws of an existing one.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator type used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Reward = 1,
    TreeNoise = 2,
    EliminationNoise = 3,
    LocalNoise = 4,
    Test = 255,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub base_seed: u64,
    pub rep: u64,
    pub arm: u32,
    pub purpose: Purpose,
}

impl StreamKey {
    pub fn new(base_seed: u64, rep: u64, arm: usize, purpose: Purpose) -> Self {
        Self {
            base_seed,
            rep,
            arm: u32::try_from(arm).expect("arm index fits in u32"),
            purpose,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut state = self.base_seed ^ 0x6a09_e667_f3bc_c908;
        let mut seed = [0u8; 32];
        let mut words = [0u64; 4];
        words[0] = splitmix64(&mut state);
        state ^= self.rep.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        for w in words.iter_mut().skip(1) {
            *w = splitmix64(&mut state);
        }
        for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream((u64::from(self.arm) << 8) | self.purpose as u64);
        rng
    }
}

/// Convenience for tests and one-off draws.
pub fn stream(base_seed: u64, rep: u64, arm: usize, purpose: Purpose) -> StreamRng {
    StreamKey::new(base_seed, rep, arm, purpose).rng()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A uniform draw on the open interval (0, 1).
#[inline]
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}
