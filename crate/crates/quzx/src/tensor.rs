//! Dense complex tensors, the value domain of diagram interpretation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense tensor. For interpreted diagrams the axes are the
/// outputs followed by the inputs, each in boundary order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    pub axis_dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(axis_dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let n: usize = axis_dims.iter().product();
        if n != data.len() {
            return Err(Error::Length {
                expected: n,
                got: data.len(),
            });
        }
        Ok(DenseTensor { axis_dims, data })
    }

    pub fn zeros(axis_dims: Vec<usize>) -> Self {
        let n = axis_dims.iter().product();
        DenseTensor {
            axis_dims,
            data: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn scalar(c: C64) -> Self {
        DenseTensor {
            axis_dims: Vec::new(),
            data: vec![c],
        }
    }

    /// A `rows x cols` matrix viewed as a tensor with one output and one input axis.
    pub fn from_matrix(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn from_vector(data: Vec<C64>) -> Self {
        DenseTensor {
            axis_dims: vec![data.len()],
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(vec![n, n]);
        for i in 0..n {
            t.data[i * n + i] = C64::new(1.0, 0.0);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.axis_dims.len()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.axis_dims)
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let off: usize = idx
            .iter()
            .zip(self.strides())
            .map(|(i, s)| i * s)
            .sum();
        self.data[off]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        DenseTensor {
            axis_dims: self.axis_dims.clone(),
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Reorders axes so that new axis `k` is old axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.rank();
        debug_assert_eq!(perm.len(), n);
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return self.clone();
        }
        let old_strides = self.strides();
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.axis_dims[p]).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; n];
        let mut off = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[off]);
            // odometer increment over the new layout
            for ax in (0..n).rev() {
                idx[ax] += 1;
                off += src_strides[ax];
                if idx[ax] < new_dims[ax] {
                    break;
                }
                off -= src_strides[ax] * new_dims[ax];
                idx[ax] = 0;
            }
        }
        DenseTensor {
            axis_dims: new_dims,
            data,
        }
    }

    /// Kronecker product with `self` as the major axes.
    pub fn kron(&self, other: &DenseTensor) -> Self {
        let mut data = Vec::with_capacity(self.len() * other.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        let mut axis_dims = self.axis_dims.clone();
        axis_dims.extend_from_slice(&other.axis_dims);
        DenseTensor { axis_dims, data }
    }

    /// Flattens the first `split` axes into rows and the rest into columns.
    pub fn matrix_shape(&self, split: usize) -> (usize, usize) {
        let r = self.axis_dims[..split].iter().product();
        let c = self.axis_dims[split..].iter().product();
        (r, c)
    }
}

pub(crate) fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Plain dense matrix product, `a` is `n x k`, `b` is `k x m`.
pub fn matmul(a: &[C64], b: &[C64], n: usize, k: usize, m: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * m];
    for i in 0..n {
        let row = &mut out[i * m..(i + 1) * m];
        for p in 0..k {
            let x = a[i * k + p];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            let brow = &b[p * m..(p + 1) * m];
            for (o, y) in row.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    out
}

/// True iff both tensors have the same axes and
/// `max|A - B| <= tol * max(1, max|A|, max|B|)`.
pub fn approx_eq(a: &DenseTensor, b: &DenseTensor, tol: f64) -> bool {
    if a.axis_dims != b.axis_dims {
        return false;
    }
    let scale = 1.0f64.max(a.max_abs()).max(b.max_abs());
    max_deviation(a, b).map_or(false, |dev| dev <= tol * scale)
}

/// Largest entrywise absolute difference, `None` on shape mismatch.
pub fn max_deviation(a: &DenseTensor, b: &DenseTensor) -> Option<f64> {
    if a.axis_dims != b.axis_dims {
        return None;
    }
    Some(
        a.data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permute_transposes_matrix() {
        let t = DenseTensor::from_matrix(
            2,
            3,
            (0..6).map(|x| C64::new(x as f64, 0.0)).collect(),
        )
        .unwrap();
        let p = t.permute(&[1, 0]);
        assert_eq!(p.axis_dims, vec![3, 2]);
        assert_eq!(p.get(&[2, 1]), t.get(&[1, 2]));
        assert_eq!(p.get(&[0, 1]), t.get(&[1, 0]));
    }

    #[test]
    fn approx_eq_shapes() {
        let a = DenseTensor::identity(3);
        assert!(approx_eq(&a, &a, 1e-10));
        assert!(!approx_eq(&a, &DenseTensor::identity(2), 1e-10));
        assert!(!approx_eq(&a, &a.scale(C64::new(2.0, 0.0)), 1e-10));
    }
}
