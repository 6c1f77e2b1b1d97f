//! Counter-based random streams.
//!
//! A trial is addressed by `(seed, point, trial)`. The ChaCha key is derived
//! from `(seed, point)`, the ChaCha stream id from the trial's chunk, and the
//! word position from the trial's offset inside that chunk, so any trial can be
//! regenerated in isolation and a Monte Carlo run gives identical draws no
//! matter how the trials are split across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Trials per ChaCha stream.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// 32-bit words consumed by one trial (five `u64` draws).
pub const WORDS_PER_TRIAL: u64 = 10;

const TWO_POW_M53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Address of the first trial a stream produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub point: u64,
    pub trial: u64,
}

impl StreamKey {
    pub fn new(seed: u64, point: u64, trial: u64) -> Self {
        StreamKey { seed, point, trial }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream of uniform and exponential variates.
#[derive(Debug, Clone)]
pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    pub fn new(key: StreamKey) -> Self {
        let mut seed = [0u8; 32];
        let words = [
            key.seed,
            key.point,
            splitmix64(key.seed ^ splitmix64(key.point)),
            splitmix64(key.point.wrapping_add(0x5851_f42d_4c95_7f2d) ^ key.seed.rotate_left(17)),
        ];
        for (dst, w) in seed.chunks_exact_mut(8).zip(words) {
            dst.copy_from_slice(&w.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(key.trial / CHUNK_TRIALS);
        rng.set_word_pos(u128::from((key.trial % CHUNK_TRIALS) * WORDS_PER_TRIAL));
        TrialStream { rng }
    }

    /// Uniform on `(0, 1]` with 53 bits of resolution.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_POW_M53
    }

    /// Exponential variate with the given rate by inverse CDF, `-ln(U)/rate`.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.next_unit().ln() / rate
    }
}
