use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

/// Name recorded in output metadata for the generator behind every stream.
pub const GENERATOR_NAME: &str = "rand_chacha::ChaCha8Rng";
pub const GENERATOR_VERSION: &str = "0.9";

/// `(master_seed, stream_id)` selects one independent, reproducible stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::new(*self)
    }
}

/// ChaCha8 keyed by the master seed with the stream id as its nonce. Output
/// block `k` of a stream depends only on `(key, stream, k)`.
#[derive(Clone, Debug)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

impl StreamRng {
    pub fn new(seed: SeedSpec) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed.master_seed);
        inner.set_stream(seed.stream_id);
        StreamRng { inner }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Standard normal by inversion of one open uniform.
    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        -std::f64::consts::SQRT_2 * erfc_inv(2.0 * self.uniform_open())
    }
}
