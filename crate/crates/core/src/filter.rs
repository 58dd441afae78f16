//! Low/high band separation with a normalised cutoff `c ∈ [0, 1]`.
//!
//! The mask keeps DCT coefficient `(p, q)` iff `p < k` and `q < k`, where
//! `k = round(c · n)` (ties round up). The high band is computed as
//! `x - low` so the two bands always sum back to the input exactly.

use rayon::prelude::*;

use crate::dct::{forward_plane, inverse_plane, DctPlan};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Batches with total energy at or below this are rejected by energy ratios.
pub const ZERO_ENERGY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandMask {
    size: usize,
    cutoff: f64,
    keep: usize,
}

impl BandMask {
    pub fn new(size: usize, cutoff: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        let keep = ((cutoff * size as f64) + 0.5).floor() as usize;
        Ok(Self {
            size,
            cutoff,
            keep: keep.min(size),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Number of retained frequencies along each axis.
    pub fn keep(&self) -> usize {
        self.keep
    }

    pub fn passes(&self, row_freq: usize, col_freq: usize) -> bool {
        row_freq < self.keep && col_freq < self.keep
    }

    /// The mask as a row-major `size x size` plane of zeros and ones.
    pub fn to_plane(&self) -> Vec<f32> {
        let n = self.size;
        (0..n * n)
            .map(|i| if self.passes(i / n, i % n) { 1.0 } else { 0.0 })
            .collect()
    }

    pub fn is_all_pass(&self) -> bool {
        self.keep == self.size
    }

    pub fn is_all_stop(&self) -> bool {
        self.keep == 0
    }
}

/// How a tensor decomposes into square planes. Accepts `H x W`,
/// `H x W x C` and `N x H x W x C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneLayout {
    pub batch: usize,
    pub side: usize,
    pub channels: usize,
}

impl PlaneLayout {
    pub fn of(x: &Tensor) -> Result<Self> {
        let (batch, h, w, channels) = match *x.dims() {
            [h, w] => (1, h, w, 1),
            [h, w, c] => (1, h, w, c),
            [n, h, w, c] => (n, h, w, c),
            ref d => {
                return Err(Error::ShapeMismatch(format!(
                    "expected HxW, HxWxC or NxHxWxC, got {d:?}"
                )))
            }
        };
        if h != w {
            return Err(Error::NonSquarePlane {
                height: h,
                width: w,
            });
        }
        Ok(Self {
            batch,
            side: h,
            channels,
        })
    }

    pub fn planes(&self) -> usize {
        self.batch * self.channels
    }

    fn gather(&self, data: &[f32], plane: usize) -> Vec<f32> {
        let (item, ch) = (plane / self.channels, plane % self.channels);
        let area = self.side * self.side;
        let base = item * area * self.channels;
        (0..area)
            .map(|px| data[base + px * self.channels + ch])
            .collect()
    }

    fn scatter(&self, out: &mut [f32], plane: usize, values: &[f32]) {
        let (item, ch) = (plane / self.channels, plane % self.channels);
        let area = self.side * self.side;
        let base = item * area * self.channels;
        for (px, &v) in values.iter().enumerate() {
            out[base + px * self.channels + ch] = v;
        }
    }
}

/// `idct2d(M ⊙ dct2d(x))` applied to every plane of `x`.
pub fn low_pass(x: &Tensor, cutoff: f64, plan: &DctPlan) -> Result<Tensor> {
    let layout = PlaneLayout::of(x)?;
    let mask = BandMask::new(layout.side, cutoff)?;
    check_plan(&layout, plan)?;
    Ok(apply_mask(x, &layout, &mask, plan))
}

/// `x - low_pass(x, c)`.
pub fn high_pass(x: &Tensor, cutoff: f64, plan: &DctPlan) -> Result<Tensor> {
    let low = low_pass(x, cutoff, plan)?;
    Ok(subtract(x, &low))
}

/// Both bands of `x`: `(low, x - low)`.
pub fn split_bands(x: &Tensor, cutoff: f64, plan: &DctPlan) -> Result<(Tensor, Tensor)> {
    let low = low_pass(x, cutoff, plan)?;
    let high = subtract(x, &low);
    Ok((low, high))
}

/// `Σ‖Low(x_i, c)‖² / Σ‖x_i‖²` over every plane of `x`.
pub fn band_energy_fraction(x: &Tensor, cutoff: f64, plan: &DctPlan) -> Result<f64> {
    let total = x.energy();
    if total <= ZERO_ENERGY_THRESHOLD {
        return Err(Error::ZeroEnergyBatch(total));
    }
    let low = low_pass(x, cutoff, plan)?;
    Ok(energy_ratio(low.energy(), total))
}

/// Ratio of a band energy to the total it was taken from, clamped to `[0, 1]`
/// against rounding.
pub(crate) fn energy_ratio(band: f64, total: f64) -> f64 {
    (band / total).clamp(0.0, 1.0)
}

pub(crate) fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(Error::CutoffOutOfRange(cutoff));
    }
    Ok(())
}

fn check_plan(layout: &PlaneLayout, plan: &DctPlan) -> Result<()> {
    if plan.size() != layout.side {
        return Err(Error::ShapeMismatch(format!(
            "plan of size {} for {}x{} planes",
            plan.size(),
            layout.side,
            layout.side
        )));
    }
    Ok(())
}

fn apply_mask(x: &Tensor, layout: &PlaneLayout, mask: &BandMask, plan: &DctPlan) -> Tensor {
    if mask.is_all_pass() {
        return x.clone();
    }
    let mut out = Tensor::zeros(x.dims().to_vec()).expect("dims already valid");
    if mask.is_all_stop() {
        return out;
    }
    let n = layout.side;
    let filtered: Vec<Vec<f32>> = (0..layout.planes())
        .into_par_iter()
        .map(|p| {
            let plane = layout.gather(x.data(), p);
            let mut spec = forward_plane(&plane, plan, plan);
            for (i, v) in spec.iter_mut().enumerate() {
                if !mask.passes(i / n, i % n) {
                    *v = 0.0;
                }
            }
            inverse_plane(&spec, plan, plan)
        })
        .collect();
    for (p, values) in filtered.iter().enumerate() {
        layout.scatter(out.data_mut(), p, values);
    }
    out
}

fn subtract(a: &Tensor, b: &Tensor) -> Tensor {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x - y).collect();
    Tensor::new(a.dims().to_vec(), data).expect("same shape")
}
