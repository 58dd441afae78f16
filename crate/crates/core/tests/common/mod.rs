//! Reference implementations shared by the integration suites. Everything
//! here is plain f64 and written straight from the definitions, without
//! reusing library internals.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use robustmix::{RngState, Tensor};

fn scale(u: usize, n: usize) -> f64 {
    if u == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

fn basis(u: usize, x: usize, n: usize) -> f64 {
    scale(u, n) * (PI * (2 * x + 1) as f64 * u as f64 / (2 * n) as f64).cos()
}

/// Orthonormal 2-D DCT-II by the quadruple sum.
pub fn naive_dct2(plane: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    for u in 0..h {
        for v in 0..w {
            let mut acc = 0.0;
            for x in 0..h {
                for y in 0..w {
                    acc += basis(u, x, h) * basis(v, y, w) * plane[x * w + y];
                }
            }
            out[u * w + v] = acc;
        }
    }
    out
}

pub fn naive_idct2(spec: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    for x in 0..h {
        for y in 0..w {
            let mut acc = 0.0;
            for u in 0..h {
                for v in 0..w {
                    acc += basis(u, x, h) * basis(v, y, w) * spec[u * w + v];
                }
            }
            out[x * w + y] = acc;
        }
    }
    out
}

/// Frequencies kept per axis: `c·n` rounded half up.
pub fn kept(n: usize, c: f64) -> usize {
    ((c * n as f64) + 0.5).floor() as usize
}

/// Square-mask low pass of one `n x n` plane.
pub fn naive_low_pass_plane(plane: &[f64], n: usize, c: f64) -> Vec<f64> {
    let k = kept(n, c);
    let mut s = naive_dct2(plane, n, n);
    for u in 0..n {
        for v in 0..n {
            if u >= k || v >= k {
                s[u * n + v] = 0.0;
            }
        }
    }
    naive_idct2(&s, n, n)
}

/// Low pass of an `N x n x n x C` batch, one plane at a time.
pub fn naive_low_pass(x: &[f64], batch: usize, n: usize, ch: usize, c: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for b in 0..batch {
        for k in 0..ch {
            let idx = |p: usize| b * n * n * ch + p * ch + k;
            let plane: Vec<f64> = (0..n * n).map(|p| x[idx(p)]).collect();
            for (p, v) in naive_low_pass_plane(&plane, n, c).into_iter().enumerate() {
                out[idx(p)] = v;
            }
        }
    }
    out
}

/// Spectral energy inside the kept block over total spectral energy.
pub fn naive_energy_fraction(x: &[f64], batch: usize, n: usize, ch: usize, c: f64) -> f64 {
    let k = kept(n, c);
    let (mut low, mut total) = (0.0, 0.0);
    for b in 0..batch {
        for k_ch in 0..ch {
            let plane: Vec<f64> = (0..n * n)
                .map(|p| x[b * n * n * ch + p * ch + k_ch])
                .collect();
            let s = naive_dct2(&plane, n, n);
            for u in 0..n {
                for v in 0..n {
                    let e = s[u * n + v] * s[u * n + v];
                    total += e;
                    if u < k && v < k {
                        low += e;
                    }
                }
            }
        }
    }
    low / total
}

pub fn to_f64(t: &Tensor) -> Vec<f64> {
    t.data().iter().map(|&v| f64::from(v)).collect()
}

pub fn max_abs(a: &[f64], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, &y)| (x - f64::from(y)).abs())
        .fold(0.0, f64::max)
}

pub fn random_tensor(dims: Vec<usize>, rng: &mut RngState) -> Tensor {
    let len = dims.iter().product();
    Tensor::new(
        dims,
        (0..len).map(|_| rng.random_range(-1.0f32..1.0)).collect(),
    )
    .unwrap()
}

/// Rows drawn uniformly on the simplex (normalised exponentials).
pub fn random_simplex(rows: usize, classes: usize, rng: &mut RngState) -> Tensor {
    let mut data = Vec::with_capacity(rows * classes);
    for _ in 0..rows {
        let e: Vec<f64> = (0..classes)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let s: f64 = e.iter().sum();
        data.extend(e.iter().map(|v| (v / s) as f32));
    }
    Tensor::new(vec![rows, classes], data).unwrap()
}

/// `λ·a + (1 - λ)·b` in f64.
pub fn lerp(a: &[f64], b: &[f64], lambda: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
        .collect()
}

/// Rows of an `N x ...` buffer in reverse order.
pub fn reverse_rows(x: &[f64], rows: usize) -> Vec<f64> {
    let r = x.len() / rows;
    (0..rows)
        .rev()
        .flat_map(|i| x[i * r..(i + 1) * r].to_vec())
        .collect()
}

/// CDF of the symmetric Beta(α, α) by quadrature.
///
/// With `u = t^α` the integrand `t^(α-1) (1-t)^(α-1) dt` becomes
/// `(1/α) (1 - u^(1/α))^(α-1) du`, which is bounded on `t ≤ 1/2`. The upper
/// half follows from symmetry.
pub struct BetaCdf {
    alpha: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl BetaCdf {
    pub fn new(alpha: f64, steps: usize) -> Self {
        let upper = 0.5f64.powf(alpha);
        let step = upper / steps as f64;
        let f = |u: f64| (1.0 - u.powf(1.0 / alpha)).powf(alpha - 1.0) / alpha;
        let mut cumulative = vec![0.0; steps + 1];
        for i in 0..steps {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            // Simpson on each cell
            cumulative[i + 1] =
                cumulative[i] + (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        let half = cumulative[steps];
        for v in &mut cumulative {
            *v /= 2.0 * half;
        }
        Self {
            alpha,
            step,
            cumulative,
        }
    }

    fn lower(&self, t: f64) -> f64 {
        let pos = t.powf(self.alpha) / self.step;
        let i = (pos.floor() as usize).min(self.cumulative.len() - 2);
        let frac = pos - i as f64;
        self.cumulative[i] + frac * (self.cumulative[i + 1] - self.cumulative[i])
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.5 {
            self.lower(t)
        } else {
            1.0 - self.lower(1.0 - t)
        }
    }
}

pub fn ks_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
