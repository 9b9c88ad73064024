//! Deterministic random state with named streams.
//!
//! Every stochastic operation takes an explicit [`RngState`]. Streams let
//! independent pipeline stages draw from the same per-document seed without
//! interfering: the sample set produced for one document never depends on
//! which other stages ran.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stable 64-bit fold of a seed and a document id (FNV-1a).
///
/// Used to derive per-document seeds, so adding or reordering documents
/// never perturbs another document's samples.
pub fn hash64(seed: u64, text: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for byte in seed.to_le_bytes().iter().chain(text.as_bytes()) {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Seeded, streamed random state. Identical (seed, stream, call sequence)
/// yields identical outputs across runs and thread schedules.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngState { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw from [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform draw from [lo, hi).
    pub fn next_range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Uniform index draw from [0, n). Panics if n = 0.
    pub fn next_index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// `k` distinct indices from [0, n), returned in ascending order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut picked = rand::seq::index::sample(&mut self.rng, n, k.min(n)).into_vec();
        picked.sort_unstable();
        picked
    }
}
