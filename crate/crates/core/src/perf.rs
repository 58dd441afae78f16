//! Wall-clock throughput of the Robustmix kernel next to its MAC count.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::augment::{robustmix_batch, AugmentConfig, Policy};
use crate::dct::flop_estimate;
use crate::error::{Error, Result};
use crate::sampler::RngState;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub size: usize,
    pub channels: usize,
    pub batch: usize,
    pub iterations: usize,
    /// Six matrix products per plane, one MAC counted as one FLOP.
    pub model_macs_per_image: u64,
    /// Products the reordered kernel actually runs: one forward and one
    /// inverse transform per plane, the high band taken by subtraction.
    pub executed_macs_per_image: u64,
    pub seconds: f64,
    pub images_per_second: f64,
    /// `model_macs_per_image * images_per_second / 1e9`.
    pub model_gmacs_per_second: f64,
}

/// Times `robustmix_batch` on random square `batch x size x size x channels`
/// inputs with two classes.
pub fn measure_throughput(
    size: usize,
    channels: usize,
    batch: usize,
    iterations: usize,
    seed: u64,
) -> Result<BenchReport> {
    if size == 0 || channels == 0 || batch == 0 || iterations == 0 {
        return Err(Error::InvalidSpec(format!(
            "bench needs positive size, channels, batch and iterations; got {size}, {channels}, {batch}, {iterations}"
        )));
    }
    let mut rng = RngState::new(seed);
    let pixels = batch * size * size * channels;
    let x = Tensor::new(
        vec![batch, size, size, channels],
        (0..pixels).map(|_| rng.random::<f32>()).collect(),
    )?;
    let labels: Vec<usize> = (0..batch).map(|i| i % 2).collect();
    let y = Tensor::one_hot(&labels, 2)?;
    let cfg = AugmentConfig::new(Policy::Robustmix, 0.2);

    // warm the plan cache outside the timed region
    robustmix_batch(&x, &y, &cfg, &mut rng)?;
    let start = Instant::now();
    for _ in 0..iterations {
        std::hint::black_box(robustmix_batch(&x, &y, &cfg, &mut rng)?);
    }
    let seconds = start.elapsed().as_secs_f64();
    let images = (batch * iterations) as f64;
    let model = flop_estimate(size, size, channels);
    let images_per_second = images / seconds;
    Ok(BenchReport {
        size,
        channels,
        batch,
        iterations,
        model_macs_per_image: model,
        executed_macs_per_image: 4 * (size as u64).pow(3) * channels as u64,
        seconds,
        images_per_second,
        model_gmacs_per_second: model as f64 * images_per_second / 1e9,
    })
}
