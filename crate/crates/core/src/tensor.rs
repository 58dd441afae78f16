//! Dense row-major `f32` arrays of rank one to four.
//!
//! Image batches are laid out `N x H x W x C`, single planes `H x W`, label
//! matrices `N x K`.

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        check_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::InvalidTensor(format!(
                "dims {dims:?} need {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims,
            data: vec![0.0; len],
        })
    }

    pub fn filled(dims: Vec<usize>, value: f32) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        t.data.fill(value);
        Ok(t)
    }

    /// One-hot label matrix `N x classes`.
    pub fn one_hot(labels: &[usize], classes: usize) -> Result<Self> {
        let mut t = Self::zeros(vec![labels.len(), classes])?;
        for (row, &label) in labels.iter().enumerate() {
            if label >= classes {
                return Err(Error::InvalidLabels(format!(
                    "label {label} out of range for {classes} classes"
                )));
            }
            t.data[row * classes + label] = 1.0;
        }
        Ok(t)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// Same data under new dims with an equal element count.
    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.data)
    }

    /// Squared L2 norm, accumulated in `f64`.
    pub fn energy(&self) -> f64 {
        energy(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f32> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max))
    }

    pub fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    /// Index of the first non-finite element, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|v| !v.is_finite())
    }

    /// Extent of the leading (batch) axis.
    pub fn leading(&self) -> usize {
        self.dims[0]
    }

    /// Number of elements in one slice along the leading axis.
    pub fn row_len(&self) -> usize {
        self.dims[1..].iter().product()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let r = self.row_len();
        &self.data[i * r..(i + 1) * r]
    }

    /// Stacks equally shaped tensors along a new leading axis.
    pub fn stack(items: &[Tensor]) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidTensor("cannot stack zero tensors".into()))?;
        let mut dims = vec![items.len()];
        dims.extend_from_slice(first.dims());
        let mut data = Vec::with_capacity(first.len() * items.len());
        for t in items {
            first.check_same_shape(t)?;
            data.extend_from_slice(t.data());
        }
        Self::new(dims, data)
    }

    /// Copies rows `indices` of the leading axis into a new tensor.
    pub fn gather_rows(&self, indices: &[usize]) -> Result<Self> {
        let r = self.row_len();
        let mut data = Vec::with_capacity(indices.len() * r);
        for &i in indices {
            if i >= self.leading() {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} out of range for leading extent {}",
                    self.leading()
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        let mut dims = self.dims.clone();
        dims[0] = indices.len();
        Self::new(dims, data)
    }
}

pub(crate) fn energy(values: &[f32]) -> f64 {
    values.iter().map(|&v| f64::from(v) * f64::from(v)).sum()
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.len() > MAX_RANK {
        return Err(Error::InvalidTensor(format!(
            "rank must be 1..={MAX_RANK}, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidTensor(format!(
            "extents must be positive, got {dims:?}"
        )));
    }
    Ok(())
}
