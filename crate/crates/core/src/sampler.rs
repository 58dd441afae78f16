//! Seedable sampling of the mixing coefficients and the cutoff.
//!
//! Streams are ChaCha8 seeded through `seed_from_u64`, which is specified
//! bit-for-bit and therefore reproducible across platforms.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream `stream` derived from the same seed. Stream 0 is the
    /// stream returned by [`RngState::new`]; workers should use 1, 2, ...
    pub fn split(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        Self {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// One minibatch's sampled parameters. `energy_weight` is zero until the low
/// band of the batch is known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustmixDraw {
    pub lambda_low: f64,
    pub lambda_high: f64,
    pub cutoff: f64,
    pub energy_weight: f64,
}

impl RobustmixDraw {
    /// The draw that leaves a batch untouched.
    pub const IDENTITY: RobustmixDraw = RobustmixDraw {
        lambda_low: 1.0,
        lambda_high: 1.0,
        cutoff: 1.0,
        energy_weight: 1.0,
    };

    pub fn new(lambda_low: f64, lambda_high: f64, cutoff: f64) -> Self {
        Self {
            lambda_low,
            lambda_high,
            cutoff,
            energy_weight: 0.0,
        }
    }
}

/// A draw from the symmetric `Beta(alpha, alpha)`.
pub fn sample_beta(alpha: f64, rng: &mut RngState) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let beta = Beta::new(alpha, alpha).map_err(|_| Error::InvalidAlpha(alpha))?;
    Ok(beta.sample(rng))
}

/// Uniform on `[tau, 1]`; `tau = 1` always yields exactly 1.
pub fn sample_cutoff(tau: f64, rng: &mut RngState) -> Result<f64> {
    check_tau(tau)?;
    Ok(tau + (1.0 - tau) * rng.uniform())
}

/// `(λ_L, λ_H, c)` drawn in that order.
pub fn sample_draw(alpha: f64, tau: f64, rng: &mut RngState) -> Result<RobustmixDraw> {
    check_tau(tau)?;
    let lambda_low = sample_beta(alpha, rng)?;
    let lambda_high = sample_beta(alpha, rng)?;
    let cutoff = sample_cutoff(tau, rng)?;
    Ok(RobustmixDraw::new(lambda_low, lambda_high, cutoff))
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidTau(tau));
    }
    Ok(())
}
