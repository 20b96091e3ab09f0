//! Seeded random streams.
//!
//! Each particle of a run owns one ChaCha stream keyed by `(run seed,
//! particle index)`, so the noise a particle sees does not depend on how
//! runs are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Points;

/// SplitMix64 finalizer; decorrelates derived seeds.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A single stream for work that is not per particle (initial positions,
/// subset selection).
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, tag));
    rng.set_stream(u64::MAX);
    rng
}

/// Standard normal draws, one independent stream per particle.
pub struct ParticleNoise {
    streams: Vec<ChaCha8Rng>,
}

impl ParticleNoise {
    pub fn new(seed: u64, n: usize) -> Self {
        let streams = (0..n as u64)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                rng
            })
            .collect();
        Self { streams }
    }

    /// Overwrites `out` with fresh draws; particle `i` fills row `i` from
    /// its own stream.
    pub fn fill(&mut self, out: &mut Points) {
        assert_eq!(out.len(), self.streams.len(), "noise buffer size mismatch");
        for (row, rng) in out.rows_mut().zip(&mut self.streams) {
            for x in row {
                *x = StandardNormal.sample(rng);
            }
        }
    }
}
