//! Batch augmentation policies: plain Mixup, Robustmix and its two ablations.
//!
//! Every policy pairs row `i` of the batch with a partner row (by default the
//! batch reversed, so `i` pairs with `N - 1 - i`) and draws one set of
//! coefficients per batch. Robustmix splits the batch into low and high DCT
//! bands at cutoff `c`, mixes each band with its own coefficient and weights
//! the label coefficients by the fraction of batch energy in the low band:
//!
//! ```text
//! L = Low(X, c)          H = X - L          λ_c = ‖L‖² / ‖X‖²
//! X̃ = mix(L, L', λ_L) + mix(H, H', λ_H)
//! Ỹ = mix(Y, Y', λ_c·λ_L + (1 - λ_c)·λ_H)
//! ```
//!
//! Filtering commutes with mixing, so the batch is transformed once rather
//! than once per mixed image. Mixed images are not clipped to `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dct::shared_plan;
use crate::error::{Error, Result};
use crate::filter::{energy_ratio, split_bands, PlaneLayout, ZERO_ENERGY_THRESHOLD};
use crate::sampler::{check_tau, sample_beta, sample_cutoff, RngState, RobustmixDraw};
use crate::tensor::Tensor;

/// Label rows must sum to one within this.
pub const SIMPLEX_TOLERANCE: f32 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Baseline,
    Mixup,
    Robustmix,
    RobustmixNoEnergyWeight,
    RobustmixNoInbandMix,
}

impl Policy {
    pub const ALL: [Policy; 5] = [
        Policy::Baseline,
        Policy::Mixup,
        Policy::Robustmix,
        Policy::RobustmixNoEnergyWeight,
        Policy::RobustmixNoInbandMix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Baseline => "baseline",
            Policy::Mixup => "mixup",
            Policy::Robustmix => "robustmix",
            Policy::RobustmixNoEnergyWeight => "robustmix_no_energy_weight",
            Policy::RobustmixNoInbandMix => "robustmix_no_inband_mix",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| {
                let names: Vec<_> = Policy::ALL.iter().map(|p| p.name()).collect();
                format!("unknown policy {s:?}, expected one of {}", names.join(", "))
            })
    }
}

/// How each row finds the row it is mixed with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Row `i` pairs with row `N - 1 - i`. An odd batch's middle row pairs
    /// with itself.
    #[default]
    Reverse,
    /// A uniformly random permutation drawn after the coefficients.
    RandomPermutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub policy: Policy,
    pub alpha: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pairing: Pairing,
}

impl AugmentConfig {
    pub fn new(policy: Policy, alpha: f64) -> Self {
        Self {
            policy,
            alpha,
            tau: 0.0,
            seed: 0,
            pairing: Pairing::Reverse,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.policy != Policy::Baseline && !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        check_tau(self.tau)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedBatch {
    pub images: Tensor,
    pub labels: Tensor,
    pub draw: RobustmixDraw,
}

/// Which scalar weights the low-band label coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelWeighting {
    /// Fraction of batch energy below the cutoff.
    Energy,
    /// The cutoff itself.
    Cutoff,
}

/// `λ·a + (1 - λ)·b` elementwise.
pub fn mix(a: &Tensor, b: &Tensor, lambda: f64) -> Result<Tensor> {
    a.check_same_shape(b)?;
    let l = lambda as f32;
    let data = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| l * x + (1.0 - l) * y)
        .collect();
    Tensor::new(a.dims().to_vec(), data)
}

/// Partner indices for batch reversal.
pub fn reverse_partners(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

/// Runs `cfg.policy` on one batch.
pub fn augment_batch(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
) -> Result<MixedBatch> {
    match cfg.policy {
        Policy::Baseline => {
            check_batch(x, y)?;
            Ok(MixedBatch {
                images: x.clone(),
                labels: y.clone(),
                draw: RobustmixDraw::IDENTITY,
            })
        }
        Policy::Mixup => mixup_batch(x, y, cfg, rng),
        Policy::Robustmix => robustmix_batch(x, y, cfg, rng),
        Policy::RobustmixNoEnergyWeight => robustmix_no_energy_weight_batch(x, y, cfg, rng),
        Policy::RobustmixNoInbandMix => robustmix_no_inband_mix_batch(x, y, cfg, rng),
    }
}

/// Plain Mixup with one `λ ~ Beta(α, α)` for the batch.
pub fn mixup_batch(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
) -> Result<MixedBatch> {
    cfg.validate()?;
    check_batch(x, y)?;
    let lambda = sample_beta(cfg.alpha, rng)?;
    let partners = draw_partners(x.leading(), cfg.pairing, rng);
    mixup_with(x, y, lambda, &partners)
}

/// Mixup with a given coefficient and pairing.
pub fn mixup_with(x: &Tensor, y: &Tensor, lambda: f64, partners: &[usize]) -> Result<MixedBatch> {
    check_batch(x, y)?;
    check_partners(partners, x.leading())?;
    Ok(MixedBatch {
        images: mix_rows(x, lambda, partners),
        labels: mix_rows(y, lambda, partners),
        draw: RobustmixDraw {
            lambda_low: lambda,
            lambda_high: lambda,
            cutoff: 1.0,
            energy_weight: 1.0,
        },
    })
}

/// Robustmix with `λ_L, λ_H ~ Beta(α, α)` and `c ~ U(τ, 1)`.
pub fn robustmix_batch(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
) -> Result<MixedBatch> {
    robustmix_sampled(x, y, cfg, rng, LabelWeighting::Energy)
}

/// Robustmix with the label weighted by `c` instead of the band energy.
pub fn robustmix_no_energy_weight_batch(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
) -> Result<MixedBatch> {
    robustmix_sampled(x, y, cfg, rng, LabelWeighting::Cutoff)
}

/// Band swap without in-band interpolation: `λ_L = 1`, `λ_H = 0`, so the
/// image is `Low(x₁) + High(x₂)` and the label `λ_c·y₁ + (1 - λ_c)·y₂`.
/// Only the cutoff is drawn.
pub fn robustmix_no_inband_mix_batch(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
) -> Result<MixedBatch> {
    cfg.validate()?;
    check_batch(x, y)?;
    let cutoff = sample_cutoff(cfg.tau, rng)?;
    let partners = draw_partners(x.leading(), cfg.pairing, rng);
    robustmix_with(
        x,
        y,
        RobustmixDraw::new(1.0, 0.0, cutoff),
        LabelWeighting::Energy,
        &partners,
    )
}

fn robustmix_sampled(
    x: &Tensor,
    y: &Tensor,
    cfg: &AugmentConfig,
    rng: &mut RngState,
    weighting: LabelWeighting,
) -> Result<MixedBatch> {
    cfg.validate()?;
    check_batch(x, y)?;
    let lambda_low = sample_beta(cfg.alpha, rng)?;
    let lambda_high = sample_beta(cfg.alpha, rng)?;
    let cutoff = sample_cutoff(cfg.tau, rng)?;
    let partners = draw_partners(x.leading(), cfg.pairing, rng);
    robustmix_with(
        x,
        y,
        RobustmixDraw::new(lambda_low, lambda_high, cutoff),
        weighting,
        &partners,
    )
}

/// Robustmix with given coefficients. `draw.energy_weight` is ignored on
/// input and set on output.
pub fn robustmix_with(
    x: &Tensor,
    y: &Tensor,
    draw: RobustmixDraw,
    weighting: LabelWeighting,
    partners: &[usize],
) -> Result<MixedBatch> {
    check_batch(x, y)?;
    check_partners(partners, x.leading())?;
    let layout = PlaneLayout::of(x)?;
    let total = x.energy();
    if total <= ZERO_ENERGY_THRESHOLD {
        return Err(Error::ZeroEnergyBatch(total));
    }
    let plan = shared_plan(layout.side)?;
    let (low, high) = split_bands(x, draw.cutoff, &plan)?;
    let energy_weight = energy_ratio(low.energy(), total);

    let mut images = mix_rows(&low, draw.lambda_low, partners);
    let high_mixed = mix_rows(&high, draw.lambda_high, partners);
    for (o, h) in images.data_mut().iter_mut().zip(high_mixed.data()) {
        *o += h;
    }

    let band_weight = match weighting {
        LabelWeighting::Energy => energy_weight,
        LabelWeighting::Cutoff => draw.cutoff,
    };
    let label_lambda = label_coefficient(draw.lambda_low, draw.lambda_high, band_weight);
    Ok(MixedBatch {
        images,
        labels: mix_rows(y, label_lambda, partners),
        draw: RobustmixDraw {
            energy_weight,
            ..draw
        },
    })
}

/// Row `i` of the result is `λ·t[i] + (1 - λ)·t[partners[i]]`.
/// Single interpolation weight for the labels: `w·λ_L + (1 - w)·λ_H`, where
/// `w` is the low band's label weight.
pub fn label_coefficient(lambda_low: f64, lambda_high: f64, band_weight: f64) -> f64 {
    band_weight * lambda_low + (1.0 - band_weight) * lambda_high
}

fn mix_rows(t: &Tensor, lambda: f64, partners: &[usize]) -> Tensor {
    let l = lambda as f32;
    let r = t.row_len();
    let mut data = Vec::with_capacity(t.len());
    for (i, &p) in partners.iter().enumerate() {
        data.extend(
            t.row(i)
                .iter()
                .zip(t.row(p))
                .map(|(&a, &b)| l * a + (1.0 - l) * b),
        );
    }
    debug_assert_eq!(data.len(), partners.len() * r);
    Tensor::new(t.dims().to_vec(), data).expect("shape preserved")
}

fn draw_partners(n: usize, pairing: Pairing, rng: &mut RngState) -> Vec<usize> {
    match pairing {
        Pairing::Reverse => reverse_partners(n),
        Pairing::RandomPermutation => {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        }
    }
}

fn check_partners(partners: &[usize], n: usize) -> Result<()> {
    if partners.len() != n || partners.iter().any(|&p| p >= n) {
        return Err(Error::ShapeMismatch(format!(
            "pairing of length {} for a batch of {n}",
            partners.len()
        )));
    }
    Ok(())
}

fn check_batch(x: &Tensor, y: &Tensor) -> Result<()> {
    if x.rank() != 4 {
        return Err(Error::ShapeMismatch(format!(
            "images must be NxHxWxC, got {:?}",
            x.dims()
        )));
    }
    if y.rank() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "labels must be NxK, got {:?}",
            y.dims()
        )));
    }
    if x.leading() != y.leading() {
        return Err(Error::ShapeMismatch(format!(
            "{} images but {} label rows",
            x.leading(),
            y.leading()
        )));
    }
    for i in 0..y.leading() {
        let row = y.row(i);
        if row.iter().any(|&v| v.is_nan() || v < 0.0) {
            return Err(Error::InvalidLabels(format!(
                "row {i} has a negative or NaN entry"
            )));
        }
        let sum: f32 = row.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidLabels(format!("row {i} sums to {sum}")));
        }
    }
    Ok(())
}
