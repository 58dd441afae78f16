use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use robustmix::metrics::{
    argmax_rows, check_cutoff_list, cumulative_energy_curve, lowpass_accuracy_sweep,
    mean_corruption_error, shape_bias, write_curve_csv, CorruptionTable,
};
use robustmix::perf::measure_throughput;
use robustmix::toy::{
    compare_policies, generate_synthetic_dataset, CheckpointManifest, LinearModel, PolicyRun,
    SyntheticSpec, TrainConfig,
};
use robustmix::{
    augment_batch, read_image, read_tensor, write_tensor, AugmentConfig, Error, Policy, RngState,
    Tensor,
};
use serde::Serialize;

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Output(io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Output(e) => write!(f, "writing output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e)
    }
}

type Outcome = Result<(), Failure>;

/// Core validation errors raised by bad flag values.
fn usage(e: Error) -> Failure {
    match e {
        Error::InvalidAlpha(_)
        | Error::InvalidTau(_)
        | Error::CutoffOutOfRange(_)
        | Error::InvalidSpec(_) => Failure::Usage(e.to_string()),
        e => Failure::Core(e),
    }
}

pub fn run(cli: Cli) -> Outcome {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    match cli.command {
        Command::Augment(a) => augment(a),
        Command::Spectrum(a) => spectrum(a),
        Command::LowpassEval(a) => lowpass_eval(a),
        Command::TrainDemo(a) => train_demo(a),
        Command::Mce(a) => mce(a),
        Command::ShapeBias(a) => shape_bias_cmd(a),
        Command::Bench(a) => bench(a),
    }
}

fn augment(a: AugmentArgs) -> Outcome {
    let cfg = AugmentConfig::new(a.policy.into(), a.alpha)
        .with_tau(a.tau)
        .with_seed(a.seed.seed)
        .with_pairing(a.pairing.into());
    cfg.validate().map_err(usage)?;
    let x = read_tensor(&a.input)?;
    let y = read_tensor(&a.labels)?;
    let out = augment_batch(&x, &y, &cfg, &mut RngState::new(cfg.seed))?;
    write_tensor(&out.images, &a.out_images)?;
    write_tensor(&out.labels, &a.out_labels)?;
    let draw = serde_json::to_string(&out.draw).map_err(Error::from)?;
    if let Some(path) = &a.draw_json {
        fs::write(path, &draw).map_err(|e| {
            Failure::Core(Error::Io {
                path: path.clone(),
                source: e,
            })
        })?;
    }
    println!("{draw}");
    Ok(())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Core(Error::Io {
                path: p.to_path_buf(),
                source: e,
            })
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_corpus(dir: &Path) -> Result<Vec<Tensor>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?
            .path();
        if matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("pgm" | "ppm" | "rten")
        ) {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            if p.extension().is_some_and(|e| e == "rten") {
                read_tensor(p)
            } else {
                read_image(p)
            }
            .map_err(Failure::from)
        })
        .collect()
}

fn spectrum(a: SpectrumArgs) -> Outcome {
    check_cutoff_list(&a.cutoffs).map_err(|e| Failure::Usage(e.to_string()))?;
    let corpus = load_corpus(&a.corpus)?;
    let curve = cumulative_energy_curve(&corpus, &a.cutoffs)?;
    let mut out = output(a.out.as_deref())?;
    write_curve_csv(&curve.cutoffs, &curve.fractions, &mut out)?;
    out.flush()?;
    Ok(())
}

fn class_indices(labels: &Tensor) -> Result<Vec<usize>, Failure> {
    match labels.rank() {
        1 => labels
            .data()
            .iter()
            .map(|&v| {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(Failure::Core(Error::InvalidLabels(format!(
                        "{v} is not a class index"
                    ))))
                }
            })
            .collect(),
        2 => Ok(argmax_rows(labels)?),
        _ => Err(Failure::Core(Error::InvalidLabels(format!(
            "labels must be N or NxK, got {:?}",
            labels.dims()
        )))),
    }
}

fn lowpass_eval(a: LowpassArgs) -> Outcome {
    check_cutoff_list(&a.cutoffs).map_err(|e| Failure::Usage(e.to_string()))?;
    let (model, _) = LinearModel::load(&a.checkpoint)?;
    let images = read_tensor(&a.images)?;
    let labels = class_indices(&read_tensor(&a.labels)?)?;
    let curve = lowpass_accuracy_sweep(&model, &images, &labels, &a.cutoffs)?;
    let mut out = output(a.out.as_deref())?;
    write_curve_csv(&curve.cutoffs, &curve.accuracies, &mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PolicySummary {
    policy: Policy,
    mean_test_accuracy: f64,
    std_test_accuracy: f64,
    mean_train_accuracy: f64,
    cutoffs: Vec<f64>,
    mean_sweep: Vec<f64>,
}

fn summarise(policy: Policy, runs: &[&PolicyRun]) -> PolicySummary {
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.test_accuracy).sum::<f64>() / n;
    let var = if runs.len() > 1 {
        runs.iter()
            .map(|r| (r.test_accuracy - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let cutoffs = runs[0].sweep.cutoffs.clone();
    let mean_sweep = (0..cutoffs.len())
        .map(|i| runs.iter().map(|r| r.sweep.accuracies[i]).sum::<f64>() / n)
        .collect();
    PolicySummary {
        policy,
        mean_test_accuracy: mean,
        std_test_accuracy: var.sqrt(),
        mean_train_accuracy: runs.iter().map(|r| r.train_accuracy).sum::<f64>() / n,
        cutoffs,
        mean_sweep,
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| {
        Failure::Core(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

fn train_demo(a: TrainDemoArgs) -> Outcome {
    if a.seeds == 0 {
        return Err(Failure::Usage("--seeds must be at least 1".into()));
    }
    if a.policies.is_empty() {
        return Err(Failure::Usage(
            "--policies must name at least one policy".into(),
        ));
    }
    check_cutoff_list(&a.cutoffs).map_err(|e| Failure::Usage(e.to_string()))?;
    let spec = SyntheticSpec {
        size: a.size,
        classes: a.classes,
        signal_cutoff: a.signal_cutoff,
        distractor_amplitude: a.rho,
        noise_std: a.noise,
        train_size: a.train_size,
        test_size: a.test_size,
        seed: a.seed.seed,
        ..SyntheticSpec::default()
    };
    spec.validate().map_err(usage)?;
    let augment = AugmentConfig::new(Policy::Baseline, a.alpha).with_tau(a.tau);
    for &p in &a.policies {
        AugmentConfig {
            policy: p.into(),
            ..augment.clone()
        }
        .validate()
        .map_err(usage)?;
    }
    let train_cfg = TrainConfig {
        augment,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        momentum: a.momentum,
        batch_size: a.batch_size,
    };
    let policies: Vec<Policy> = a.policies.iter().map(|&p| p.into()).collect();
    let seeds: Vec<u64> = (0..a.seeds).map(|i| a.seed.seed.wrapping_add(i)).collect();
    let runs = compare_policies(&spec, &policies, &seeds, &train_cfg, &a.cutoffs)?;

    let dir = &a.out_dir;
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let results_path = dir.join("results.csv");
    let mut results = csv::Writer::from_path(&results_path).map_err(Error::from)?;
    results
        .write_record(["policy", "seed", "train_accuracy", "test_accuracy"])
        .map_err(Error::from)?;
    let sweeps_path = dir.join("sweeps.csv");
    let mut sweeps = csv::Writer::from_path(&sweeps_path).map_err(Error::from)?;
    sweeps
        .write_record(["policy", "seed", "cutoff", "accuracy"])
        .map_err(Error::from)?;
    for r in &runs {
        results
            .write_record([
                r.policy.name().to_string(),
                r.seed.to_string(),
                r.train_accuracy.to_string(),
                r.test_accuracy.to_string(),
            ])
            .map_err(Error::from)?;
        for (c, acc) in r.sweep.cutoffs.iter().zip(&r.sweep.accuracies) {
            sweeps
                .write_record([
                    r.policy.name().to_string(),
                    r.seed.to_string(),
                    c.to_string(),
                    acc.to_string(),
                ])
                .map_err(Error::from)?;
        }
        let manifest = CheckpointManifest {
            spec: SyntheticSpec {
                seed: r.seed,
                ..spec.clone()
            },
            train: TrainConfig {
                augment: AugmentConfig {
                    policy: r.policy,
                    ..train_cfg.augment.clone()
                },
                ..train_cfg.clone()
            },
            seed: r.seed,
        };
        r.model.save(
            dir.join("checkpoints")
                .join(format!("{}-seed{}", r.policy.name(), r.seed)),
            &manifest,
        )?;
    }
    results.flush().map_err(io_at(&results_path))?;
    sweeps.flush().map_err(io_at(&sweeps_path))?;

    let summaries: Vec<PolicySummary> = policies
        .iter()
        .map(|&p| {
            let sel: Vec<&PolicyRun> = runs.iter().filter(|r| r.policy == p).collect();
            summarise(p, &sel)
        })
        .collect();
    let summary_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summaries).map_err(Error::from)?;
    fs::write(&summary_path, json).map_err(io_at(&summary_path))?;

    // test split of the first seed, for lowpass-eval
    let first = SyntheticSpec {
        seed: seeds[0],
        ..spec.clone()
    };
    let data = generate_synthetic_dataset(&first, &mut RngState::new(seeds[0]))?;
    write_tensor(&data.test.images, dir.join("test_images.rten"))?;
    let labels: Vec<f32> = data.test.labels.iter().map(|&l| l as f32).collect();
    write_tensor(
        &Tensor::new(vec![labels.len()], labels)?,
        dir.join("test_labels.rten"),
    )?;

    let mut stdout = io::stdout().lock();
    writeln!(stdout, "policy,mean_test_accuracy,std_test_accuracy")?;
    for s in &summaries {
        writeln!(
            stdout,
            "{},{:.4},{:.4}",
            s.policy, s.mean_test_accuracy, s.std_test_accuracy
        )?;
    }
    Ok(())
}

fn mce(a: MceArgs) -> Outcome {
    let table = CorruptionTable::read_csv(&a.table)?;
    let value = mean_corruption_error(&table)?;
    let mut stdout = io::stdout().lock();
    if a.per_corruption {
        for (name, ce) in table.corruption_errors()? {
            writeln!(stdout, "{name},{ce:?}")?;
        }
    }
    writeln!(stdout, "mCE,{value:?}")?;
    Ok(())
}

fn shape_bias_cmd(a: ShapeBiasArgs) -> Outcome {
    let value = shape_bias(a.shape, a.texture)?;
    println!("shape_bias,{value:?}");
    Ok(())
}

#[derive(Serialize)]
struct BenchOutput {
    #[serde(flatten)]
    report: robustmix::perf::BenchReport,
    model_gflops_per_image: f64,
    flop_convention: &'static str,
}

fn bench(a: BenchArgs) -> Outcome {
    let report = measure_throughput(a.size, a.channels, a.batch, a.iterations, a.seed.seed)
        .map_err(usage)?;
    let out = BenchOutput {
        model_gflops_per_image: report.model_macs_per_image as f64 / 1e9,
        report,
        flop_convention:
            "one multiply-accumulate counted as one FLOP; six n x n matrix products per plane",
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).map_err(Error::from)?
    );
    Ok(())
}
