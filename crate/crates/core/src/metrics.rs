//! Robustness measurements.
//!
//! * corruption error `CE_c = 100 · Σ_s E_{c,s} / Σ_s E^ref_{c,s}` and its
//!   unweighted mean over corruptions (mCE), from externally measured tables;
//! * shape bias `correct shapes / (correct shapes + correct textures)`;
//! * cumulative spectral energy of an image corpus as a function of cutoff;
//! * accuracy of a predictor on low-passed inputs as a function of cutoff.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dct::{forward_plane, shared_plan};
use crate::error::{Error, Result};
use crate::filter::{check_cutoff, low_pass, BandMask, PlaneLayout, ZERO_ENERGY_THRESHOLD};
use crate::tensor::Tensor;

/// Per-corruption error rates over severities, with the matching reference
/// model errors.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionErrors {
    pub name: String,
    pub severities: Vec<u32>,
    pub model: Vec<f64>,
    pub reference: Vec<f64>,
}

/// A full corruption table, corruptions in first-appearance order and
/// severities ascending within each.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorruptionTable {
    pub corruptions: Vec<CorruptionErrors>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableRow {
    corruption: String,
    severity: u32,
    model_error: f64,
    ref_error: f64,
}

impl CorruptionTable {
    /// Adds one (corruption, severity) cell.
    pub fn push(
        &mut self,
        corruption: &str,
        severity: u32,
        model_error: f64,
        ref_error: f64,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&model_error) {
            return Err(Error::InvalidTable(format!(
                "{corruption}/{severity}: model error {model_error} outside [0, 1]"
            )));
        }
        if !(ref_error > 0.0 && ref_error <= 1.0) {
            return Err(Error::InvalidTable(format!(
                "{corruption}/{severity}: reference error {ref_error} outside (0, 1]"
            )));
        }
        let entry = match self
            .corruptions
            .iter_mut()
            .position(|c| c.name == corruption)
        {
            Some(i) => &mut self.corruptions[i],
            None => {
                self.corruptions.push(CorruptionErrors {
                    name: corruption.to_owned(),
                    severities: Vec::new(),
                    model: Vec::new(),
                    reference: Vec::new(),
                });
                self.corruptions.last_mut().unwrap()
            }
        };
        let at = match entry.severities.binary_search(&severity) {
            Ok(_) => {
                return Err(Error::InvalidTable(format!(
                    "duplicate row for {corruption} severity {severity}"
                )))
            }
            Err(at) => at,
        };
        entry.severities.insert(at, severity);
        entry.model.insert(at, model_error);
        entry.reference.insert(at, ref_error);
        Ok(())
    }

    /// Parses `corruption,severity,model_error,ref_error` CSV.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        let expected = ["corruption", "severity", "model_error", "ref_error"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::InvalidTable(format!(
                "header must be {}, got {}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut table = CorruptionTable::default();
        for row in csv.deserialize() {
            let row: TableRow = row?;
            table.push(
                &row.corruption,
                row.severity,
                row.model_error,
                row.ref_error,
            )?;
        }
        Ok(table)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for c in &self.corruptions {
            for ((&severity, &model_error), &ref_error) in
                c.severities.iter().zip(&c.model).zip(&c.reference)
            {
                csv.serialize(TableRow {
                    corruption: c.name.clone(),
                    severity,
                    model_error,
                    ref_error,
                })?;
            }
        }
        csv.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// `CE_c` for every corruption, in table order.
    pub fn corruption_errors(&self) -> Result<Vec<(String, f64)>> {
        self.corruptions
            .iter()
            .map(|c| {
                corruption_error(&c.model, &c.reference)
                    .map(|ce| (c.name.clone(), ce))
                    .map_err(|e| match e {
                        Error::ZeroReference(_) => Error::ZeroReference(c.name.clone()),
                        e => e,
                    })
            })
            .collect()
    }
}

/// `100 · Σ model / Σ reference`.
pub fn corruption_error(model_errors: &[f64], ref_errors: &[f64]) -> Result<f64> {
    if model_errors.len() != ref_errors.len() {
        return Err(Error::LengthMismatch(format!(
            "{} model severities vs {} reference severities",
            model_errors.len(),
            ref_errors.len()
        )));
    }
    let reference: f64 = ref_errors.iter().sum();
    if reference.is_nan() || reference <= 0.0 {
        return Err(Error::ZeroReference("corruption".into()));
    }
    let model: f64 = model_errors.iter().sum();
    Ok(100.0 * (model / reference))
}

/// Unweighted mean of `CE_c` over the table's corruptions.
pub fn mean_corruption_error(table: &CorruptionTable) -> Result<f64> {
    if table.corruptions.is_empty() {
        return Err(Error::EmptyTable);
    }
    let ces = table.corruption_errors()?;
    Ok(ces.iter().map(|(_, ce)| ce).sum::<f64>() / ces.len() as f64)
}

pub fn shape_bias(correct_shape: u64, correct_texture: u64) -> Result<f64> {
    let total = correct_shape + correct_texture;
    if total == 0 {
        return Err(Error::NoCorrectDecisions);
    }
    Ok(correct_shape as f64 / total as f64)
}

/// Fraction of corpus energy below each cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub cutoffs: Vec<f64>,
    pub fractions: Vec<f64>,
}

/// Accuracy on low-passed inputs at each cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub cutoffs: Vec<f64>,
    pub accuracies: Vec<f64>,
}

/// `Σ_i ‖Low(x_i, c)‖² / Σ_i ‖x_i‖²` over a corpus of square images
/// (`H x W` or `H x W x C`; sizes may differ), for every cutoff.
///
/// Energies are taken in the DCT domain and accumulated ring by ring, so the
/// curve is monotone and reaches exactly 1 at `c = 1`. Images are reduced in
/// corpus order regardless of how many threads transform them.
pub fn cumulative_energy_curve(corpus: &[Tensor], cutoffs: &[f64]) -> Result<EnergyCurve> {
    if corpus.is_empty() {
        return Err(Error::InvalidTensor("empty corpus".into()));
    }
    check_cutoff_list(cutoffs)?;
    let layouts = corpus
        .iter()
        .map(PlaneLayout::of)
        .collect::<Result<Vec<_>>>()?;
    let per_image: Vec<Vec<f64>> = corpus
        .par_iter()
        .zip(&layouts)
        .map(|(img, layout)| cumulative_ring_energy(img, layout))
        .collect::<Result<_>>()?;

    let total: f64 = per_image.iter().map(|e| e[e.len() - 1]).sum();
    if total <= ZERO_ENERGY_THRESHOLD {
        return Err(Error::ZeroEnergyBatch(total));
    }
    let mut fractions = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let mut low = 0.0;
        for (energies, layout) in per_image.iter().zip(&layouts) {
            low += energies[BandMask::new(layout.side, c)?.keep()];
        }
        fractions.push((low / total).min(1.0));
    }
    Ok(EnergyCurve {
        cutoffs: cutoffs.to_vec(),
        fractions,
    })
}

/// `out[k]` = spectral energy in the `k x k` low-frequency block, summed over
/// planes; `out[n]` is the total.
fn cumulative_ring_energy(img: &Tensor, layout: &PlaneLayout) -> Result<Vec<f64>> {
    let n = layout.side;
    let plan = shared_plan(n)?;
    let mut ring = vec![0.0f64; n];
    let mut plane = vec![0.0f32; n * n];
    for item in 0..layout.batch {
        for ch in 0..layout.channels {
            let base = item * n * n * layout.channels;
            for (px, v) in plane.iter_mut().enumerate() {
                *v = img.data()[base + px * layout.channels + ch];
            }
            let spec = forward_plane(&plane, &plan, &plan);
            for (i, &s) in spec.iter().enumerate() {
                let (p, q) = (i / n, i % n);
                ring[p.max(q)] += f64::from(s) * f64::from(s);
            }
        }
    }
    let mut out = vec![0.0f64; n + 1];
    for k in 0..n {
        out[k + 1] = out[k] + ring[k];
    }
    Ok(out)
}

/// Maps an image batch to per-class scores (`N x K`).
pub trait Predictor {
    fn predict(&self, images: &Tensor) -> Result<Tensor>;
}

impl<F> Predictor for F
where
    F: Fn(&Tensor) -> Result<Tensor>,
{
    fn predict(&self, images: &Tensor) -> Result<Tensor> {
        self(images)
    }
}

/// Row-wise argmax; ties go to the lowest class index.
pub fn argmax_rows(scores: &Tensor) -> Result<Vec<usize>> {
    if scores.rank() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "scores must be NxK, got {:?}",
            scores.dims()
        )));
    }
    Ok((0..scores.leading())
        .map(|i| {
            let row = scores.row(i);
            let mut best = 0;
            for (k, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect())
}

/// Fraction of rows whose argmax equals the label.
pub fn accuracy(scores: &Tensor, labels: &[usize]) -> Result<f64> {
    let predictions = argmax_rows(scores)?;
    if predictions.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let correct = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Accuracy of `model` on `low_pass(images, c)` for every cutoff.
pub fn lowpass_accuracy_sweep(
    model: &dyn Predictor,
    images: &Tensor,
    labels: &[usize],
    cutoffs: &[f64],
) -> Result<SweepCurve> {
    let layout = PlaneLayout::of(images)?;
    if layout.batch != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} images for {} labels",
            layout.batch,
            labels.len()
        )));
    }
    for &c in cutoffs {
        check_cutoff(c)?;
    }
    let plan = shared_plan(layout.side)?;
    let accuracies = cutoffs
        .iter()
        .map(|&c| {
            let filtered = low_pass(images, c, &plan)?;
            accuracy(&model.predict(&filtered)?, labels)
        })
        .collect::<Result<_>>()?;
    Ok(SweepCurve {
        cutoffs: cutoffs.to_vec(),
        accuracies,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    cutoff: f64,
    value: f64,
}

/// Writes `cutoff,value` CSV.
pub fn write_curve_csv(cutoffs: &[f64], values: &[f64], writer: impl Write) -> Result<()> {
    if cutoffs.len() != values.len() {
        return Err(Error::LengthMismatch(format!(
            "{} cutoffs vs {} values",
            cutoffs.len(),
            values.len()
        )));
    }
    let mut csv = csv::Writer::from_writer(writer);
    for (&cutoff, &value) in cutoffs.iter().zip(values) {
        csv.serialize(CurveRow { cutoff, value })?;
    }
    csv.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Reads `cutoff,value` CSV back into two columns.
pub fn read_curve_csv(reader: impl Read) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut cutoffs = Vec::new();
    let mut values = Vec::new();
    for row in csv.deserialize() {
        let row: CurveRow = row?;
        cutoffs.push(row.cutoff);
        values.push(row.value);
    }
    Ok((cutoffs, values))
}

/// Cutoffs must lie in `[0, 1]` and increase strictly.
pub fn check_cutoff_list(cutoffs: &[f64]) -> Result<()> {
    for &c in cutoffs {
        check_cutoff(c)?;
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTensor(format!(
            "cutoffs must be strictly increasing: {cutoffs:?}"
        )));
    }
    Ok(())
}
