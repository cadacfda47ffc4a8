//! Phase vectors labelling Z spiders.
//!
//! A phase vector `(a_1, ..., a_{d-1})` gives the weight of each basis
//! component of a Z spider; the weight of `|0>` is fixed to 1.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// `exp(2 pi i / d)`.
pub fn root_of_unity(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

/// `xi^k` reduced modulo `d` before exponentiating, which keeps large powers exact-ish.
pub fn root_power(d: usize, k: i64) -> C64 {
    let r = k.rem_euclid(d as i64);
    C64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    entries: Vec<C64>,
    /// Set when the vector is exactly `K_j`.
    symbolic: Option<usize>,
}

impl PhaseVector {
    pub fn new(entries: Vec<C64>) -> Self {
        PhaseVector {
            entries,
            symbolic: None,
        }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `K_j = (e^{i j 2pi/d}, e^{i 2j 2pi/d}, ...)`.
    pub fn k(d: usize, j: usize) -> Self {
        let entries = (1..d).map(|k| root_power(d, (k * j) as i64)).collect();
        PhaseVector {
            entries,
            symbolic: Some(j % d),
        }
    }

    /// `e^{i alpha}` applied entrywise.
    pub fn from_angles(angles: &[f64]) -> Self {
        Self::new(angles.iter().map(|&a| C64::from_polar(1.0, a)).collect())
    }

    pub fn ones(d: usize) -> Self {
        Self::new(vec![C64::new(1.0, 0.0); d - 1])
    }

    pub fn zeros(d: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); d - 1])
    }

    pub fn minus_ones(d: usize) -> Self {
        Self::new(vec![C64::new(-1.0, 0.0); d - 1])
    }

    /// `(0, ..., 0, a)`.
    pub fn last(d: usize, a: C64) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); d - 1];
        v[d - 2] = a;
        Self::new(v)
    }

    /// `(1, ..., 1, a)`.
    pub fn ones_then(d: usize, a: C64) -> Self {
        let mut v = vec![C64::new(1.0, 0.0); d - 1];
        v[d - 2] = a;
        Self::new(v)
    }

    /// The 0-legged spider with this phase evaluates to `c`: `(0, ..., 0, c - 1)`.
    pub fn scalar(d: usize, c: C64) -> Self {
        Self::last(d, c - 1.0)
    }

    /// `s = (0, ..., 0, 1/d - 1)`, a 0-legged spider worth `1/d`.
    pub fn s(d: usize) -> Self {
        Self::scalar(d, C64::new(1.0 / d as f64, 0.0))
    }

    /// `tau_k = k pi + k^2 pi / d`, as the phases `e^{i tau_k}`.
    pub fn tau(d: usize) -> Self {
        let angles: Vec<f64> = (1..d).map(|k| tau_angle(d, k)).collect();
        Self::from_angles(&angles)
    }

    /// `V_j`: a single 1 at position `d - j` (1-based), zeros elsewhere.
    pub fn v(d: usize, j: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); d - 1];
        v[d - j - 1] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbolic_label(&self) -> Option<usize> {
        self.symbolic
    }

    /// Weight of basis component `j` with `a_0 = a_d = 1`.
    pub fn weight(&self, j: usize) -> C64 {
        let d = self.entries.len() + 1;
        let j = j % d;
        if j == 0 {
            C64::new(1.0, 0.0)
        } else {
            self.entries[j - 1]
        }
    }

    /// Entrywise product `ab`.
    pub fn mul(&self, other: &PhaseVector) -> PhaseVector {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .collect();
        let symbolic = match (self.symbolic, other.symbolic) {
            (Some(j), Some(k)) => Some((j + k) % (self.entries.len() + 1)),
            _ => None,
        };
        PhaseVector { entries, symbolic }
    }

    pub fn add(&self, other: &PhaseVector) -> PhaseVector {
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn conj(&self) -> PhaseVector {
        let d = self.entries.len() + 1;
        PhaseVector {
            entries: self.entries.iter().map(|a| a.conj()).collect(),
            symbolic: self.symbolic.map(|j| (d - j) % d),
        }
    }

    /// `(a_{d-1}, ..., a_1)`.
    pub fn reversed(&self) -> PhaseVector {
        let mut entries = self.entries.clone();
        entries.reverse();
        let d = self.entries.len() + 1;
        PhaseVector {
            entries,
            symbolic: self.symbolic.map(|j| (d - j) % d),
        }
    }

    /// Weights shifted by `j`: `(a_{1-j}/a_{d-j}, ..., a_{d-1-j}/a_{d-j})`.
    pub fn shifted(&self, j: usize) -> PhaseVector {
        let d = self.entries.len() + 1;
        let pivot = self.weight(d - j % d);
        Self::new(
            (1..d)
                .map(|k| self.weight((k + d - j % d) % d) / pivot)
                .collect(),
        )
    }

    /// All entries equal to 1 within `tol`.
    pub fn is_ones(&self, tol: f64) -> bool {
        self.entries.iter().all(|a| (a - 1.0).norm() <= tol)
    }

    /// Returns `j` when the vector equals `K_j` entrywise within `tol`.
    pub fn as_k(&self, tol: f64) -> Option<usize> {
        if let Some(j) = self.symbolic {
            return Some(j);
        }
        let d = self.entries.len() + 1;
        (0..d).find(|&j| {
            self.entries
                .iter()
                .enumerate()
                .all(|(k, a)| (a - root_power(d, ((k + 1) * j) as i64)).norm() <= tol)
        })
    }

    /// Checks the symbolic tag against the numeric entries.
    pub fn symbolic_consistent(&self, tol: f64) -> bool {
        match self.symbolic {
            None => true,
            Some(j) => {
                let d = self.entries.len() + 1;
                j < d
                    && self
                        .entries
                        .iter()
                        .enumerate()
                        .all(|(k, a)| (a - root_power(d, ((k + 1) * j) as i64)).norm() <= tol)
            }
        }
    }

    pub(crate) fn with_symbolic(mut self, j: Option<usize>) -> Self {
        self.symbolic = j;
        self
    }
}

/// `tau_k = k pi + k^2 pi / d`; `tau_0 = 0`.
pub fn tau_angle(d: usize, k: usize) -> f64 {
    let k = k as f64;
    k * PI + k * k * PI / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_vectors_match_roots() {
        let p = PhaseVector::k(5, 2);
        assert!(p.symbolic_consistent(1e-12));
        assert_eq!(p.as_k(1e-12), Some(2));
        assert!((p.weight(1) - root_of_unity(5).powu(2)).norm() < 1e-12);
    }

    #[test]
    fn tau_is_palindromic_mod_two_pi() {
        for d in 2..8 {
            let t = PhaseVector::tau(d);
            let r = t.reversed();
            for (a, b) in t.entries().iter().zip(r.entries()) {
                assert!((a - b).norm() < 1e-9, "d={d}");
            }
        }
    }

    #[test]
    fn shifted_matches_caption() {
        let d = 4;
        let a = PhaseVector::new(vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(3.0, 0.0)]);
        let s = a.shifted(1);
        // (a_0/a_3, a_1/a_3, a_2/a_3)
        assert!((s.entries()[0] - 1.0 / 3.0).norm() < 1e-12);
        assert!((s.entries()[1] - 2.0 / 3.0).norm() < 1e-12);
        assert!((s.entries()[2] - C64::new(0.0, 1.0 / 3.0)).norm() < 1e-12);
        let _ = d;
    }

    #[test]
    fn scalar_gadget_weight() {
        let s = PhaseVector::s(4);
        let total: C64 = (0..4).map(|j| s.weight(j)).sum();
        assert!((total - 0.25).norm() < 1e-12);
    }
}
