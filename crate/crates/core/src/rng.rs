//! Seeded random streams and the primitive draws built on them.
//!
//! A [`RandomStream`] is identified by `(seed, stream_id)`. The underlying
//! generator is ChaCha8 in counter mode: the seed fixes the key, the stream id
//! selects the nonce, and the block counter advances with every draw. Two
//! streams with the same identity always produce the same sequence, on any
//! platform and under any thread schedule, so work can be split across workers
//! by handing each unit of work its own stream id.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Position in the keystream, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`: 53 random bits, offset by half an ulp.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}

/// `tan(pi (U - 1/2))` for `U` uniform on `(0, 1)`; never infinite.
#[inline]
pub fn standard_cauchy(rng: &mut RandomStream) -> f64 {
    (PI * (rng.uniform_open() - 0.5)).tan()
}

/// Draw from `C(center, scale)`. A zero scale returns `center`.
pub fn sample_cauchy(center: f64, scale: f64, rng: &mut RandomStream) -> Result<f64> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return param(format!("Cauchy scale must be finite and >= 0, got {scale}"));
    }
    if scale == 0.0 {
        return Ok(center);
    }
    Ok(center + scale * standard_cauchy(rng))
}

#[inline]
pub fn sample_std_normal(rng: &mut RandomStream) -> f64 {
    rng.rng().sample(StandardNormal)
}

/// Chi-squared with one degree of freedom: the square of a standard normal.
#[inline]
pub fn sample_chi2_1(rng: &mut RandomStream) -> f64 {
    let z = sample_std_normal(rng);
    z * z
}
