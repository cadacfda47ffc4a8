//! Closed-form tensors for single generators.
//!
//! Every builder writes only the nonzero entries; the naive per-entry
//! formulas live in the test oracle.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::generator::GeneratorKind;
use crate::phase::root_power;
use crate::tensor::{strides_of, DenseTensor};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// The tensor of a generator with axes outputs first, then inputs.
pub fn interpret_kind(
    kind: &GeneratorKind,
    d: usize,
    n_in: usize,
    n_out: usize,
) -> Result<DenseTensor> {
    kind.check(d, n_in, n_out)?;
    Ok(match kind {
        GeneratorKind::ZSpider { phase } => {
            let weights: Vec<C64> = (0..d).map(|j| phase.weight(j)).collect();
            z_tensor(&weights, n_in + n_out)
        }
        GeneratorKind::XSpider { label } => {
            let coeffs: Vec<i64> = std::iter::repeat(1)
                .take(n_out)
                .chain(std::iter::repeat(-1).take(n_in))
                .collect();
            x_tensor(d, *label, &coeffs)
        }
        GeneratorKind::H => fourier(d, 1),
        GeneratorKind::HDagger => fourier(d, -1),
        GeneratorKind::Triangle => triangle(d, 1.0),
        GeneratorKind::TriangleInv => triangle(d, -1.0),
        GeneratorKind::WSpider => w_tensor(d, n_in, n_out),
        GeneratorKind::DimBinder { s, t } => {
            let (s, t) = (*s, *t);
            let mut out = DenseTensor::zeros(vec![s * t, s, t]);
            for k in 0..s {
                for l in 0..t {
                    out.data[(k * t + l) * s * t + k * t + l] = ONE;
                }
            }
            out
        }
        GeneratorKind::DimSplitter { s, t } => {
            let (s, t) = (*s, *t);
            let mut out = DenseTensor::zeros(vec![s, t, s * t]);
            for k in 0..s * t {
                let (q, r) = (k / t, k % t);
                out.data[(q * t + r) * s * t + k] = ONE;
            }
            out
        }
    })
}

/// `sum_j w_j |j...j>` over `legs` axes of dimension `w.len()`.
pub(crate) fn z_tensor(weights: &[C64], legs: usize) -> DenseTensor {
    let d = weights.len();
    if legs == 0 {
        return DenseTensor::scalar(weights.iter().sum());
    }
    let dims = vec![d; legs];
    let diag_stride: usize = strides_of(&dims).iter().sum();
    let mut out = DenseTensor::zeros(dims);
    for (j, w) in weights.iter().enumerate() {
        out.data[j * diag_stride] = *w;
    }
    out
}

/// Entries equal 1 exactly where `sum_k c_k i_k + label = 0 (mod d)`.
/// Output legs carry `c = +1`, input legs `c = -1`.
pub(crate) fn x_tensor(d: usize, label: usize, coeffs: &[i64]) -> DenseTensor {
    let n = coeffs.len();
    if n == 0 {
        return DenseTensor::scalar(if label % d == 0 { ONE } else { C64::new(0.0, 0.0) });
    }
    let dims = vec![d; n];
    let strides = strides_of(&dims);
    let mut out = DenseTensor::zeros(dims);
    let di = d as i64;
    // Solve for the last leg whose coefficient is a unit; otherwise fall back
    // to a scan of every index.
    let pivot = (0..n).rev().find(|&k| coeffs[k].rem_euclid(di) == 1 || coeffs[k].rem_euclid(di) == di - 1);
    let mut idx = vec![0usize; n];
    match pivot {
        Some(p) => {
            let free: Vec<usize> = (0..n).filter(|&k| k != p).collect();
            let total = d.pow(free.len() as u32);
            for _ in 0..total {
                let mut acc = label as i64;
                for &k in &free {
                    acc += coeffs[k] * idx[k] as i64;
                }
                // c_p * x + acc = 0 with c_p = +-1
                let cp = coeffs[p].rem_euclid(di);
                let x = if cp == 1 { (-acc).rem_euclid(di) } else { acc.rem_euclid(di) };
                idx[p] = x as usize;
                let off: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
                out.data[off] = ONE;
                for &k in free.iter().rev() {
                    idx[k] += 1;
                    if idx[k] < d {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        None => {
            for off in 0..out.data.len() {
                let mut acc = label as i64;
                let mut rem = off;
                for k in (0..n).rev() {
                    acc += coeffs[k] * (rem % d) as i64;
                    rem /= d;
                }
                if acc.rem_euclid(di) == 0 {
                    out.data[off] = ONE;
                }
            }
        }
    }
    out
}

/// `sum xi^{sign * jk} |j><k|`.
fn fourier(d: usize, sign: i64) -> DenseTensor {
    let mut out = DenseTensor::zeros(vec![d, d]);
    for j in 0..d {
        for k in 0..d {
            out.data[j * d + k] = root_power(d, sign * (j * k) as i64);
        }
    }
    out
}

/// `I + sign * sum_{i>=1} |0><i|`.
fn triangle(d: usize, sign: f64) -> DenseTensor {
    let mut out = DenseTensor::identity(d);
    for i in 1..d {
        out.data[i] = C64::new(sign, 0.0);
    }
    out
}

/// W spider: all legs zero, or exactly one nonzero input and one nonzero
/// output carrying the same value.
pub(crate) fn w_tensor(d: usize, n_in: usize, n_out: usize) -> DenseTensor {
    let n = n_in + n_out;
    if n == 0 {
        return DenseTensor::scalar(ONE);
    }
    let dims = vec![d; n];
    let strides = strides_of(&dims);
    let mut out = DenseTensor::zeros(dims);
    out.data[0] = ONE;
    if n_in == 0 || n_out == 0 {
        return out;
    }
    for i in 1..d {
        for o in 0..n_out {
            for k in 0..n_in {
                out.data[i * strides[o] + i * strides[n_out + k]] = ONE;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhaseVector;

    fn mat(t: &DenseTensor) -> Vec<Vec<C64>> {
        let n = t.axis_dims[0];
        let m = t.axis_dims[1];
        (0..n).map(|i| t.data[i * m..(i + 1) * m].to_vec()).collect()
    }

    #[test]
    fn triangle_d3() {
        let t = interpret_kind(&GeneratorKind::Triangle, 3, 1, 1).unwrap();
        let r = |v: [f64; 3]| v.map(|x| C64::new(x, 0.0)).to_vec();
        assert_eq!(mat(&t), vec![r([1., 1., 1.]), r([0., 1., 0.]), r([0., 0., 1.])]);
    }

    #[test]
    fn classical_point_is_d_minus_j() {
        let t = interpret_kind(&GeneratorKind::x(2), 5, 0, 1).unwrap();
        let mut e3 = vec![C64::new(0.0, 0.0); 5];
        e3[3] = ONE;
        assert_eq!(t.data, e3);
        let co = interpret_kind(&GeneratorKind::x(2), 5, 1, 0).unwrap();
        assert_eq!(co.data[2], ONE);
        assert_eq!(co.data.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn hadamard_d2() {
        let h = interpret_kind(&GeneratorKind::H, 2, 1, 1).unwrap();
        let expect = [1.0, 1.0, 1.0, -1.0];
        for (a, b) in h.data.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn s_gadget_is_one_over_d() {
        let t = interpret_kind(&GeneratorKind::z(PhaseVector::s(4)), 4, 0, 0).unwrap();
        assert!((t.data[0] - 0.25).norm() < 1e-15);
    }

    #[test]
    fn arity_error() {
        assert!(interpret_kind(&GeneratorKind::H, 3, 2, 1).is_err());
    }
}
