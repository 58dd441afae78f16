use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robustmix::{Pairing, Policy};

#[derive(Parser, Debug)]
#[command(
    name = "robustmix",
    version,
    about = "Frequency-band Mixup and low-frequency bias measurements"
)]
pub struct Cli {
    /// Worker threads for batch transforms (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SeedArg {
    #[arg(long, env = "ROBUSTMIX_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mix an image batch and its labels with one policy
    Augment(AugmentArgs),
    /// Cumulative spectral energy of an image corpus against cutoff
    Spectrum(SpectrumArgs),
    /// Accuracy of a saved model on low-passed images against cutoff
    LowpassEval(LowpassArgs),
    /// Train linear models on the synthetic distractor task under each policy
    TrainDemo(TrainDemoArgs),
    /// Mean corruption error from an error table
    Mce(MceArgs),
    /// Shape-decision fraction from cue-conflict counts
    ShapeBias(ShapeBiasArgs),
    /// Time the band-split kernel and compare with its MAC count
    Bench(BenchArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum PolicyArg {
    Baseline,
    Mixup,
    Robustmix,
    #[value(alias = "robustmix_no_energy_weight")]
    RobustmixNoEnergyWeight,
    #[value(alias = "robustmix_no_inband_mix")]
    RobustmixNoInbandMix,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Baseline => Policy::Baseline,
            PolicyArg::Mixup => Policy::Mixup,
            PolicyArg::Robustmix => Policy::Robustmix,
            PolicyArg::RobustmixNoEnergyWeight => Policy::RobustmixNoEnergyWeight,
            PolicyArg::RobustmixNoInbandMix => Policy::RobustmixNoInbandMix,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Default)]
pub enum PairingArg {
    #[default]
    Reverse,
    Random,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Reverse => Pairing::Reverse,
            PairingArg::Random => Pairing::RandomPermutation,
        }
    }
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    #[arg(long, value_enum)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Lower bound of the cutoff draw
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t)]
    pub pairing: PairingArg,
    #[command(flatten)]
    pub seed: SeedArg,
    /// N x H x W x C image batch (RTEN)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// N x K label rows (RTEN)
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out_images: PathBuf,
    #[arg(long)]
    pub out_labels: PathBuf,
    /// Also write the drawn coefficients as JSON
    #[arg(long)]
    pub draw_json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Directory of PGM/PPM images or RTEN tensors
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated increasing cutoffs in [0, 1]
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"
    )]
    pub cutoffs: Vec<f64>,
    /// CSV destination (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LowpassArgs {
    /// Checkpoint directory written by `train-demo`
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// N x H x W x C images (RTEN)
    #[arg(long)]
    pub images: PathBuf,
    /// Class indices (N) or label rows (N x K), RTEN
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"
    )]
    pub cutoffs: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainDemoArgs {
    /// Output directory for results, checkpoints and the first seed's test split
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "baseline,mixup,robustmix,robustmix-no-energy-weight,robustmix-no-inband-mix"
    )]
    pub policies: Vec<PolicyArg>,
    /// First dataset seed; seeds run consecutively from here
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    #[arg(long, default_value_t = 4)]
    pub classes: usize,
    #[arg(long, default_value_t = 0.25)]
    pub signal_cutoff: f64,
    /// High-band distractor strength relative to the class signal
    #[arg(long, default_value_t = 1.0)]
    pub rho: f32,
    #[arg(long, default_value_t = 0.02)]
    pub noise: f32,
    #[arg(long, default_value_t = 1024)]
    pub train_size: usize,
    #[arg(long, default_value_t = 1024)]
    pub test_size: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.0625,0.125,0.1875,0.25,0.3125,0.375,0.4375,0.5,0.5625,0.625,0.6875,0.75,0.8125,0.875,0.9375,1"
    )]
    pub cutoffs: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct MceArgs {
    /// CSV with header corruption,severity,model_error,ref_error
    #[arg(long)]
    pub table: PathBuf,
    /// Print each corruption's CE before the mean
    #[arg(long)]
    pub per_corruption: bool,
}

#[derive(Args, Debug)]
pub struct ShapeBiasArgs {
    #[arg(long)]
    pub shape: u64,
    #[arg(long)]
    pub texture: u64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 224)]
    pub size: usize,
    #[arg(long, default_value_t = 3)]
    pub channels: usize,
    #[arg(long, default_value_t = 8)]
    pub batch: usize,
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}
