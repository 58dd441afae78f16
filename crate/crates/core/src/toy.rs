//! Desk-scale check of low-frequency bias: a linear softmax classifier on
//! synthetic images whose class is carried by a low-band pattern, plus a
//! high-band distractor that predicts the class in the training split and
//! is drawn independently of the class in the test split.
//!
//! A model that leans on the distractor loses accuracy on the test split; one
//! that leans on the low band does not.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::augment::{augment_batch, AugmentConfig, Policy};
use crate::dct::{inverse_plane, make_plan};
use crate::error::{Error, Result};
use crate::filter::BandMask;
use crate::io::{read_tensor, write_tensor};
use crate::metrics::{accuracy, lowpass_accuracy_sweep, Predictor, SweepCurve};
use crate::sampler::RngState;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Side of the square single-channel images.
    pub size: usize,
    pub classes: usize,
    /// Class patterns live strictly below this normalised cutoff.
    pub signal_cutoff: f64,
    /// Pixel RMS of the class patterns.
    pub signal_rms: f32,
    /// Distractor pixel RMS as a multiple of `signal_rms`.
    pub distractor_amplitude: f32,
    /// Pixel RMS of class-independent low-band variation.
    pub nuisance_rms: f32,
    /// Constant offset added to every pixel.
    pub background: f32,
    /// Std of white pixel noise.
    pub noise_std: f32,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            size: 32,
            classes: 4,
            signal_cutoff: 0.25,
            signal_rms: 0.1,
            distractor_amplitude: 1.0,
            nuisance_rms: 0.2,
            background: 0.5,
            noise_std: 0.02,
            train_size: 1024,
            test_size: 1024,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.signal_cutoff > 0.0 && self.signal_cutoff < 1.0) {
            return bad(format!(
                "signal cutoff {} outside (0, 1)",
                self.signal_cutoff
            ));
        }
        if self.classes < 2 {
            return bad(format!("need at least two classes, got {}", self.classes));
        }
        if self.train_size < self.classes || self.test_size < self.classes {
            return bad(format!(
                "split sizes {}/{} smaller than the class count {}",
                self.train_size, self.test_size, self.classes
            ));
        }
        let keep = self.signal_keep();
        if keep < 2 || keep >= self.size {
            return bad(format!(
                "signal band keeps {keep} of {} frequencies; need a non-trivial low and high band",
                self.size
            ));
        }
        for (name, v) in [
            ("signal_rms", self.signal_rms),
            ("distractor_amplitude", self.distractor_amplitude),
            ("nuisance_rms", self.nuisance_rms),
            ("noise_std", self.noise_std),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if self.signal_rms == 0.0 {
            return bad("signal_rms must be positive".into());
        }
        Ok(())
    }

    /// Frequencies per axis inside the signal band.
    pub fn signal_keep(&self) -> usize {
        BandMask::new(self.size, self.signal_cutoff)
            .map(|m| m.keep())
            .unwrap_or(0)
    }

    pub fn features(&self) -> usize {
        self.size * self.size
    }
}

/// One split: `N x n x n x 1` images and class indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub images: Tensor,
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDataset {
    pub train: Split,
    pub test: Split,
    /// Clean low-band class patterns, `n x n` each.
    pub signal_patterns: Vec<Tensor>,
    /// Clean high-band distractor patterns, `n x n` each, at unit amplitude
    /// (pixel RMS `signal_rms`).
    pub distractor_patterns: Vec<Tensor>,
}

/// Builds both splits. Labels are balanced (`i mod K`); train distractors
/// follow the label, test distractors are drawn uniformly and independently.
pub fn generate_synthetic_dataset(
    spec: &SyntheticSpec,
    rng: &mut RngState,
) -> Result<SyntheticDataset> {
    spec.validate()?;
    let n = spec.size;
    let keep = spec.signal_keep();
    let plan = make_plan(n)?;
    let in_signal_band = |i: usize| (i / n) < keep && (i % n) < keep;

    let pattern =
        |rng: &mut RngState, select: &dyn Fn(usize) -> bool, rms: f32| -> Result<Tensor> {
            let spec_coeffs: Vec<f32> = (0..n * n)
                .map(|i| {
                    let z: f32 = rng.sample(StandardNormal);
                    if i != 0 && select(i) {
                        z
                    } else {
                        0.0
                    }
                })
                .collect();
            let mut plane = inverse_plane(&spec_coeffs, &plan, &plan);
            let current = (crate::tensor::energy(&plane) / (n * n) as f64).sqrt() as f32;
            for v in &mut plane {
                *v *= rms / current;
            }
            Tensor::new(vec![n, n], plane)
        };

    let signal_patterns = (0..spec.classes)
        .map(|_| pattern(rng, &in_signal_band, spec.signal_rms))
        .collect::<Result<Vec<_>>>()?;
    let distractor_patterns = (0..spec.classes)
        .map(|_| pattern(rng, &|i| !in_signal_band(i), spec.signal_rms))
        .collect::<Result<Vec<_>>>()?;

    // per-coefficient std giving the requested nuisance pixel RMS
    let nuisance_coeff_std = spec.nuisance_rms * n as f32 / ((keep * keep - 1) as f32).sqrt();

    let make_split = |size: usize, spurious: bool, rng: &mut RngState| -> Result<Split> {
        let labels: Vec<usize> = (0..size).map(|i| i % spec.classes).collect();
        let mut data = Vec::with_capacity(size * n * n);
        for &label in &labels {
            let distractor = if spurious {
                rng.random_range(0..spec.classes)
            } else {
                label
            };
            let coeffs: Vec<f32> = (0..n * n)
                .map(|i| {
                    if i != 0 && in_signal_band(i) {
                        nuisance_coeff_std * rng.sample::<f32, _>(StandardNormal)
                    } else {
                        0.0
                    }
                })
                .collect();
            let nuisance = inverse_plane(&coeffs, &plan, &plan);
            let s = signal_patterns[label].data();
            let d = distractor_patterns[distractor].data();
            for px in 0..n * n {
                let noise: f32 = rng.sample(StandardNormal);
                data.push(
                    spec.background
                        + s[px]
                        + nuisance[px]
                        + spec.distractor_amplitude * d[px]
                        + spec.noise_std * noise,
                );
            }
        }
        Ok(Split {
            images: Tensor::new(vec![size, n, n, 1], data)?,
            labels,
        })
    };

    let train = make_split(spec.train_size, false, rng)?;
    let test = make_split(spec.test_size, true, rng)?;
    Ok(SyntheticDataset {
        train,
        test,
        signal_patterns,
        distractor_patterns,
    })
}

/// `scores = W · x + b` over flattened images.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    classes: usize,
    features: usize,
    weights: Vec<f32>,
    bias: Vec<f32>,
}

/// Gradient of the mean cross-entropy, laid out like the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(classes: usize, features: usize) -> Self {
        Self {
            classes,
            features,
            weights: vec![0.0; classes * features],
            bias: vec![0.0; classes],
        }
    }

    /// Weights drawn from `N(0, scale²)`, zero bias.
    pub fn random(classes: usize, features: usize, scale: f32, rng: &mut RngState) -> Self {
        let mut m = Self::zeros(classes, features);
        for w in &mut m.weights {
            *w = scale * rng.sample::<f32, _>(StandardNormal);
        }
        m
    }

    pub fn from_parts(weights: Tensor, bias: Tensor) -> Result<Self> {
        let (classes, features) = match *weights.dims() {
            [k, f] => (k, f),
            ref d => {
                return Err(Error::ShapeMismatch(format!(
                    "weights must be KxF, got {d:?}"
                )))
            }
        };
        if bias.dims() != [classes] {
            return Err(Error::ShapeMismatch(format!(
                "bias {:?} for {classes} classes",
                bias.dims()
            )));
        }
        Ok(Self {
            classes,
            features,
            weights: weights.into_data(),
            bias: bias.into_data(),
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn bias(&self) -> &[f32] {
        &self.bias
    }

    pub fn weights_tensor(&self) -> Tensor {
        Tensor::new(vec![self.classes, self.features], self.weights.clone()).expect("valid dims")
    }

    pub fn bias_tensor(&self) -> Tensor {
        Tensor::new(vec![self.classes], self.bias.clone()).expect("valid dims")
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }

    fn check_input(&self, images: &Tensor) -> Result<usize> {
        if images.rank() < 2 || images.row_len() != self.features {
            return Err(Error::ShapeMismatch(format!(
                "model takes {} features per example, input is {:?}",
                self.features,
                images.dims()
            )));
        }
        Ok(images.leading())
    }

    fn logits_row(&self, x: &[f32], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let w = &self.weights[k * self.features..(k + 1) * self.features];
            let dot: f32 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            *o = f64::from(dot) + f64::from(self.bias[k]);
        }
    }

    /// Mean soft-label cross-entropy over the batch and its gradient.
    pub fn loss_and_gradient(&self, images: &Tensor, targets: &Tensor) -> Result<(f64, Gradient)> {
        let n = self.check_input(images)?;
        if targets.dims() != [n, self.classes] {
            return Err(Error::ShapeMismatch(format!(
                "targets {:?} for {n} examples and {} classes",
                targets.dims(),
                self.classes
            )));
        }
        let mut grad = Gradient {
            weights: vec![0.0; self.weights.len()],
            bias: vec![0.0; self.classes],
        };
        let mut logits = vec![0.0f64; self.classes];
        let mut loss = 0.0;
        for i in 0..n {
            let x = images.row(i);
            let y = targets.row(i);
            self.logits_row(x, &mut logits);
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let log_z = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
            for k in 0..self.classes {
                let log_p = logits[k] - log_z;
                let yk = f64::from(y[k]);
                loss -= yk * log_p;
                let delta = log_p.exp() - yk;
                grad.bias[k] += delta;
                let gw = &mut grad.weights[k * self.features..(k + 1) * self.features];
                for (g, &xv) in gw.iter_mut().zip(x) {
                    *g += delta * f64::from(xv);
                }
            }
        }
        let scale = 1.0 / n as f64;
        grad.weights.iter_mut().for_each(|g| *g *= scale);
        grad.bias.iter_mut().for_each(|g| *g *= scale);
        Ok((loss * scale, grad))
    }

    /// Writes `weights.rten`, `bias.rten` and `manifest.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, manifest: &CheckpointManifest) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_tensor(&self.weights_tensor(), dir.join("weights.rten"))?;
        write_tensor(&self.bias_tensor(), dir.join("bias.rten"))?;
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(manifest)?;
        fs::write(&path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<(Self, CheckpointManifest)> {
        let dir = dir.as_ref();
        let model = Self::from_parts(
            read_tensor(dir.join("weights.rten"))?,
            read_tensor(dir.join("bias.rten"))?,
        )?;
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(path, e))?;
        Ok((model, serde_json::from_str(&text)?))
    }
}

impl Predictor for LinearModel {
    fn predict(&self, images: &Tensor) -> Result<Tensor> {
        let n = self.check_input(images)?;
        let mut logits = vec![0.0f64; self.classes];
        let mut out = Vec::with_capacity(n * self.classes);
        for i in 0..n {
            self.logits_row(images.row(i), &mut logits);
            out.extend(logits.iter().map(|&v| v as f32));
        }
        Tensor::new(vec![n, self.classes], out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub augment: AugmentConfig,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
}

impl TrainConfig {
    pub fn new(augment: AugmentConfig) -> Self {
        Self {
            augment,
            epochs: 20,
            learning_rate: 0.005,
            momentum: 0.9,
            batch_size: 64,
        }
    }
}

/// Everything needed to reproduce a checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointManifest {
    pub spec: SyntheticSpec,
    pub train: TrainConfig,
    pub seed: u64,
}

/// Mini-batch SGD with momentum on soft-label cross-entropy, augmenting each
/// batch with `cfg.augment`. Starts from zero weights; the only randomness is
/// the per-epoch shuffle and the augmentation draws, both taken from `rng`.
pub fn train(
    data: &Split,
    classes: usize,
    cfg: &TrainConfig,
    rng: &mut RngState,
) -> Result<LinearModel> {
    cfg.augment.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::InvalidSpec("batch size must be positive".into()));
    }
    let n = data.images.leading();
    if data.labels.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{n} images for {} labels",
            data.labels.len()
        )));
    }
    let features = data.images.row_len();
    let mut model = LinearModel::zeros(classes, features);
    let mut velocity_w = vec![0.0f64; classes * features];
    let mut velocity_b = vec![0.0f64; classes];
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.batch_size) {
            let images = data.images.gather_rows(chunk)?;
            let labels: Vec<usize> = chunk.iter().map(|&i| data.labels[i]).collect();
            let targets = Tensor::one_hot(&labels, classes)?;
            let mixed = augment_batch(&images, &targets, &cfg.augment, rng)?;
            let (loss, grad) = model.loss_and_gradient(&mixed.images, &mixed.labels)?;
            if !loss.is_finite() {
                return Err(Error::DivergedTraining { epoch, loss });
            }
            step(&mut model.weights, &mut velocity_w, &grad.weights, cfg);
            step(&mut model.bias, &mut velocity_b, &grad.bias, cfg);
        }
        if !model.is_finite() {
            return Err(Error::DivergedTraining {
                epoch,
                loss: f64::NAN,
            });
        }
    }
    Ok(model)
}

fn step(params: &mut [f32], velocity: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
    for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(grad) {
        *v = cfg.momentum * *v - cfg.learning_rate * g;
        *p = (f64::from(*p) + *v) as f32;
    }
}

/// Fraction of argmax-correct predictions; ties resolve to the lowest class.
pub fn evaluate(model: &LinearModel, images: &Tensor, labels: &[usize]) -> Result<f64> {
    accuracy(&model.predict(images)?, labels)
}

/// One trained model's scores.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyRun {
    pub policy: Policy,
    pub seed: u64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub sweep: SweepCurve,
    #[serde(skip)]
    pub model: LinearModel,
}

/// Trains one model per (seed, policy) on the dataset generated from
/// `spec` with `seed` substituted, and scores it on both splits and on the
/// low-passed test split. The dataset stream is `RngState::new(seed)`; the
/// training stream is its split 1, shared by every policy.
pub fn compare_policies(
    spec: &SyntheticSpec,
    policies: &[Policy],
    seeds: &[u64],
    train_cfg: &TrainConfig,
    cutoffs: &[f64],
) -> Result<Vec<PolicyRun>> {
    let mut runs = Vec::with_capacity(seeds.len() * policies.len());
    for &seed in seeds {
        let spec = SyntheticSpec {
            seed,
            ..spec.clone()
        };
        let data_rng = RngState::new(seed);
        let data = generate_synthetic_dataset(&spec, &mut data_rng.clone())?;
        for &policy in policies {
            let cfg = TrainConfig {
                augment: AugmentConfig {
                    policy,
                    ..train_cfg.augment.clone()
                },
                ..train_cfg.clone()
            };
            let model = train(&data.train, spec.classes, &cfg, &mut data_rng.split(1))?;
            runs.push(PolicyRun {
                policy,
                seed,
                train_accuracy: evaluate(&model, &data.train.images, &data.train.labels)?,
                test_accuracy: evaluate(&model, &data.test.images, &data.test.labels)?,
                sweep: lowpass_accuracy_sweep(
                    &model,
                    &data.test.images,
                    &data.test.labels,
                    cutoffs,
                )?,
                model,
            });
        }
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::band_energy_fraction;

    fn small_spec() -> SyntheticSpec {
        SyntheticSpec {
            size: 16,
            train_size: 64,
            test_size: 64,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SyntheticSpec::default().validate().is_ok());
        for bad in [
            SyntheticSpec {
                signal_cutoff: 0.0,
                ..small_spec()
            },
            SyntheticSpec {
                signal_cutoff: 1.0,
                ..small_spec()
            },
            SyntheticSpec {
                classes: 1,
                ..small_spec()
            },
            SyntheticSpec {
                train_size: 2,
                ..small_spec()
            },
            SyntheticSpec {
                noise_std: -1.0,
                ..small_spec()
            },
            SyntheticSpec {
                signal_rms: 0.0,
                ..small_spec()
            },
        ] {
            assert!(matches!(
                generate_synthetic_dataset(&bad, &mut RngState::new(0)),
                Err(Error::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn class_patterns_sit_in_the_signal_band() {
        let spec = small_spec();
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(1)).unwrap();
        let plan = make_plan(spec.size).unwrap();
        for p in &data.signal_patterns {
            assert!(band_energy_fraction(p, spec.signal_cutoff, &plan).unwrap() >= 0.99);
        }
        for d in &data.distractor_patterns {
            assert!(band_energy_fraction(d, spec.signal_cutoff, &plan).unwrap() <= 0.01);
        }
    }

    #[test]
    fn splits_are_balanced() {
        let spec = small_spec();
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(2)).unwrap();
        for split in [&data.train, &data.test] {
            for k in 0..spec.classes {
                assert_eq!(split.labels.iter().filter(|&&l| l == k).count(), 16);
            }
        }
    }

    #[test]
    fn without_distractor_and_noise_splits_match() {
        let spec = SyntheticSpec {
            distractor_amplitude: 0.0,
            noise_std: 0.0,
            nuisance_rms: 0.0,
            ..small_spec()
        };
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(3)).unwrap();
        assert_eq!(data.train.labels, data.test.labels);
        assert!(data.train.images.max_abs_diff(&data.test.images).unwrap() < 1e-6);

        // nearest clean pattern classifies every test image
        let n = spec.size * spec.size;
        for (i, &label) in data.test.labels.iter().enumerate() {
            let x = data.test.images.row(i);
            let nearest = (0..spec.classes)
                .min_by(|&a, &b| {
                    let da: f32 = (0..n)
                        .map(|p| {
                            (x[p] - spec.background - data.signal_patterns[a].data()[p]).powi(2)
                        })
                        .sum();
                    let db: f32 = (0..n)
                        .map(|p| {
                            (x[p] - spec.background - data.signal_patterns[b].data()[p]).powi(2)
                        })
                        .sum();
                    da.total_cmp(&db)
                })
                .unwrap();
            assert_eq!(nearest, label);
        }
    }

    #[test]
    fn baseline_fits_separable_data() {
        let spec = SyntheticSpec {
            noise_std: 0.0,
            nuisance_rms: 0.0,
            distractor_amplitude: 0.0,
            ..small_spec()
        };
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(4)).unwrap();
        let cfg = TrainConfig::new(AugmentConfig::new(Policy::Baseline, 1.0));
        let model = train(&data.train, spec.classes, &cfg, &mut RngState::new(5)).unwrap();
        assert!(evaluate(&model, &data.train.images, &data.train.labels).unwrap() >= 0.99);
    }

    #[test]
    fn training_is_deterministic() {
        let spec = small_spec();
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(6)).unwrap();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::new(AugmentConfig::new(Policy::Robustmix, 0.4))
        };
        let a = train(&data.train, spec.classes, &cfg, &mut RngState::new(7)).unwrap();
        let b = train(&data.train, spec.classes, &cfg, &mut RngState::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfect_model_and_shape_errors() {
        // weights that read off a one-hot "image"
        let eye: Vec<f32> = (0..9).map(|i| if i % 4 == 0 { 1.0 } else { 0.0 }).collect();
        let model = LinearModel::from_parts(
            Tensor::new(vec![3, 3], eye.clone()).unwrap(),
            Tensor::zeros(vec![3]).unwrap(),
        )
        .unwrap();
        let images = Tensor::new(vec![3, 3], eye).unwrap();
        assert_eq!(evaluate(&model, &images, &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(evaluate(&model, &images, &[0, 2, 2]).unwrap(), 2.0 / 3.0);
        let wrong = Tensor::zeros(vec![3, 4]).unwrap();
        assert!(matches!(
            evaluate(&model, &wrong, &[0, 1, 2]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(LinearModel::from_parts(
            Tensor::zeros(vec![3, 3]).unwrap(),
            Tensor::zeros(vec![2]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let spec = small_spec();
        let data = generate_synthetic_dataset(&spec, &mut RngState::new(8)).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e300,
            epochs: 5,
            ..TrainConfig::new(AugmentConfig::new(Policy::Baseline, 1.0))
        };
        assert!(matches!(
            train(&data.train, spec.classes, &cfg, &mut RngState::new(0)),
            Err(Error::DivergedTraining { .. })
        ));
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let model = LinearModel::random(4, 16, 0.1, &mut RngState::new(1));
        let manifest = CheckpointManifest {
            spec: small_spec(),
            train: TrainConfig::new(AugmentConfig::new(Policy::Mixup, 0.2)),
            seed: 9,
        };
        model.save(dir.path(), &manifest).unwrap();
        let (back, m) = LinearModel::load(dir.path()).unwrap();
        assert_eq!(back, model);
        assert_eq!(m, manifest);
    }
}
