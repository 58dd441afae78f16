//! Frequency-band Mixup ("Robustmix") for image batches, with the tooling to
//! measure low-frequency bias: DCT band filters, spectral energy profiles,
//! low-pass accuracy sweeps, corruption-error and shape-bias calculators, and
//! a small linear-classifier harness.

pub mod augment;
pub mod dct;
pub mod error;
pub mod filter;
pub mod io;
pub mod metrics;
pub mod perf;
pub mod sampler;
pub mod tensor;
pub mod toy;

pub use augment::{
    augment_batch, label_coefficient, mix, mixup_batch, robustmix_batch,
    robustmix_no_energy_weight_batch, robustmix_no_inband_mix_batch, AugmentConfig, LabelWeighting,
    MixedBatch, Pairing, Policy,
};
pub use dct::{dct2d, flop_estimate, idct2d, make_plan, DctPlan, Spectrum};
pub use error::{Error, Result};
pub use filter::{band_energy_fraction, high_pass, low_pass, BandMask};
pub use io::{read_image, read_tensor, write_tensor};
pub use sampler::{sample_beta, sample_cutoff, RngState, RobustmixDraw};
pub use tensor::Tensor;
