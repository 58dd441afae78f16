//! Orthonormal 2-D DCT-II by dense matrix multiplication.
//!
//! For a plane `X` of size `H x W` the spectrum is `G_H · X · G_Wᵀ`, where
//! `G_n[u, x] = s(u) · cos(π (2x + 1) u / 2n)`, `s(0) = √(1/n)` and
//! `s(u > 0) = √(2/n)`. The inverse is `G_Hᵀ · S · G_W`. Spectrum entry
//! `(p, q)` holds vertical frequency `p` and horizontal frequency `q`; `(0, 0)`
//! is DC.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Precomputed DCT-II matrix for one extent.
#[derive(Clone, Debug)]
pub struct DctPlan {
    size: usize,
    matrix: Vec<f32>,
    transposed: Vec<f32>,
}

impl DctPlan {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSize(size));
        }
        let n = size as f64;
        let mut matrix = vec![0.0f32; size * size];
        for u in 0..size {
            let scale = if u == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            for x in 0..size {
                let angle = PI * (2 * x + 1) as f64 * u as f64 / (2.0 * n);
                matrix[u * size + x] = (scale * angle.cos()) as f32;
            }
        }
        let mut transposed = vec![0.0f32; size * size];
        for r in 0..size {
            for c in 0..size {
                transposed[c * size + r] = matrix[r * size + c];
            }
        }
        Ok(Self {
            size,
            matrix,
            transposed,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Row-major `size x size`; row `u` is the `u`-th cosine basis vector.
    pub fn matrix(&self) -> &[f32] {
        &self.matrix
    }

    /// Largest deviation of `G · Gᵀ` from the identity, accumulated in `f64`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| f64::from(self.matrix[i * n + k]) * f64::from(self.matrix[j * n + k]))
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn make_plan(n: usize) -> Result<DctPlan> {
    DctPlan::new(n)
}

/// Process-wide plan for extent `n`, built on first use.
pub fn shared_plan(n: usize) -> Result<Arc<DctPlan>> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<DctPlan>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(Default::default);
    if let Some(plan) = plans.lock().unwrap().get(&n) {
        return Ok(Arc::clone(plan));
    }
    let plan = Arc::new(DctPlan::new(n)?);
    Ok(Arc::clone(plans.lock().unwrap().entry(n).or_insert(plan)))
}

/// DCT coefficients of one `H x W` plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Spectrum {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || data.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "spectrum {height}x{width} with {} values",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn get(&self, row_freq: usize, col_freq: usize) -> f32 {
        self.data[row_freq * self.width + col_freq]
    }

    pub fn energy(&self) -> f64 {
        crate::tensor::energy(&self.data)
    }
}

/// Forward transform of an `H x W` tensor.
pub fn dct2d(plane: &Tensor, plan_h: &DctPlan, plan_w: &DctPlan) -> Result<Spectrum> {
    let (h, w) = plane_dims(plane)?;
    check_plans(h, w, plan_h, plan_w)?;
    Ok(Spectrum {
        height: h,
        width: w,
        data: forward_plane(plane.data(), plan_h, plan_w),
    })
}

/// Inverse transform back to an `H x W` tensor.
pub fn idct2d(spec: &Spectrum, plan_h: &DctPlan, plan_w: &DctPlan) -> Result<Tensor> {
    check_plans(spec.height, spec.width, plan_h, plan_w)?;
    Tensor::new(
        vec![spec.height, spec.width],
        inverse_plane(&spec.data, plan_h, plan_w),
    )
}

/// Multiply-accumulate count of one band-split pass over an image: six
/// `n x n` matrix products per plane (forward and inverse over both axes, for
/// each of the low and high paths).
pub fn flop_estimate(height: usize, width: usize, channels: usize) -> u64 {
    6 * height as u64 * width as u64 * height.max(width) as u64 * channels as u64
}

/// `G_H · X · G_Wᵀ` on a raw row-major plane.
pub(crate) fn forward_plane(x: &[f32], plan_h: &DctPlan, plan_w: &DctPlan) -> Vec<f32> {
    let (h, w) = (plan_h.size, plan_w.size);
    let mut tmp = vec![0.0f32; h * w];
    matmul(&plan_h.matrix, x, h, h, w, &mut tmp);
    let mut out = vec![0.0f32; h * w];
    matmul(&tmp, &plan_w.transposed, h, w, w, &mut out);
    out
}

/// `G_Hᵀ · S · G_W` on a raw row-major spectrum.
pub(crate) fn inverse_plane(s: &[f32], plan_h: &DctPlan, plan_w: &DctPlan) -> Vec<f32> {
    let (h, w) = (plan_h.size, plan_w.size);
    let mut tmp = vec![0.0f32; h * w];
    matmul(&plan_h.transposed, s, h, h, w, &mut tmp);
    let mut out = vec![0.0f32; h * w];
    matmul(&tmp, &plan_w.matrix, h, w, w, &mut out);
    out
}

/// `out = a · b` for row-major `a: m x k`, `b: k x n`. The i-k-j order keeps
/// the inner loop contiguous so it vectorises.
fn matmul(a: &[f32], b: &[f32], m: usize, k: usize, n: usize, out: &mut [f32]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    out.fill(0.0);
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for (p, &aip) in a[i * k..(i + 1) * k].iter().enumerate() {
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in row.iter_mut().zip(brow) {
                *o += aip * bv;
            }
        }
    }
}

fn plane_dims(plane: &Tensor) -> Result<(usize, usize)> {
    match *plane.dims() {
        [h, w] => Ok((h, w)),
        ref d => Err(Error::ShapeMismatch(format!(
            "expected an HxW plane, got {d:?}"
        ))),
    }
}

fn check_plans(h: usize, w: usize, plan_h: &DctPlan, plan_w: &DctPlan) -> Result<()> {
    if plan_h.size != h || plan_w.size != w {
        return Err(Error::ShapeMismatch(format!(
            "plane {h}x{w} with plans {}x{}",
            plan_h.size, plan_w.size
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(h: usize, w: usize, seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..h * w).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        Tensor::new(vec![h, w], data).unwrap()
    }

    #[test]
    fn small_plans() {
        assert_eq!(make_plan(1).unwrap().matrix(), &[1.0]);
        assert_eq!(&make_plan(4).unwrap().matrix()[..4], &[0.5; 4]);
        assert!(matches!(make_plan(0), Err(Error::InvalidSize(0))));
    }

    #[test]
    fn orthonormal_by_direct_product() {
        for n in [2, 3, 8, 17] {
            assert!(make_plan(n).unwrap().orthonormality_error() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn constant_plane_is_pure_dc() {
        let p = make_plan(4).unwrap();
        let x = Tensor::filled(vec![4, 4], 1.0).unwrap();
        let s = dct2d(&x, &p, &p).unwrap();
        assert!((s.get(0, 0) - 4.0).abs() < 1e-6);
        for (i, v) in s.data().iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-6, "coef {i} = {v}");
        }
        let back = idct2d(&s, &p, &p).unwrap();
        assert!(back.max_abs_diff(&x).unwrap() < 1e-6);

        let mut dc_only = Spectrum::new(4, 4, vec![0.0; 16]).unwrap();
        dc_only.data_mut()[0] = 4.0;
        let flat = idct2d(&dc_only, &p, &p).unwrap();
        assert!(flat.data().iter().all(|v| (v - 1.0).abs() < 1e-6));
    }

    #[test]
    fn zeros_map_to_zeros() {
        let p = make_plan(5).unwrap();
        let z = Tensor::zeros(vec![5, 5]).unwrap();
        assert!(dct2d(&z, &p, &p).unwrap().data().iter().all(|&v| v == 0.0));
        let zs = Spectrum::new(5, 5, vec![0.0; 25]).unwrap();
        assert!(idct2d(&zs, &p, &p)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn rectangular_parseval_and_round_trip() {
        let (ph, pw) = (make_plan(8).unwrap(), make_plan(12).unwrap());
        let x = random_plane(8, 12, 3);
        let s = dct2d(&x, &ph, &pw).unwrap();
        let rel = (s.energy() - x.energy()).abs() / x.energy();
        assert!(rel < 1e-5, "{rel}");
        let back = idct2d(&s, &ph, &pw).unwrap();
        assert!(back.max_abs_diff(&x).unwrap() < 1e-4);
    }

    #[test]
    fn round_trip_16() {
        let p = make_plan(16).unwrap();
        let x = random_plane(16, 16, 11);
        let back = idct2d(&dct2d(&x, &p, &p).unwrap(), &p, &p).unwrap();
        assert!(back.max_abs_diff(&x).unwrap() < 1e-4);
    }

    #[test]
    fn shape_mismatch() {
        let p = make_plan(4).unwrap();
        let x = Tensor::zeros(vec![4, 5]).unwrap();
        assert!(matches!(dct2d(&x, &p, &p), Err(Error::ShapeMismatch(_))));
        let x3 = Tensor::zeros(vec![4, 4, 1]).unwrap();
        assert!(matches!(dct2d(&x3, &p, &p), Err(Error::ShapeMismatch(_))));
        let s = Spectrum::new(3, 3, vec![0.0; 9]).unwrap();
        assert!(matches!(idct2d(&s, &p, &p), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn flop_model() {
        assert_eq!(flop_estimate(224, 224, 3), 6 * 224u64.pow(3) * 3);
        assert_eq!(flop_estimate(1, 1, 1), 6);
        assert_eq!(flop_estimate(32, 32, 3), 589_824);
    }
}
