//! Constructive universality: diagrams for basis states, elementary
//! matrices, arbitrary vectors, scalars and arbitrary matrices.
//!
//! Wire 0 carries the most significant digit, matching row-major tensor
//! order, so digit `a_j` of an index lives on wire `m - 1 - j`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, End, Port};
use crate::error::{Error, Result};
use crate::generator::GeneratorKind;
use crate::io::Matrix;
use crate::phase::PhaseVector;
use crate::rules::kit::{inp, out, seq, Graph};

/// Digits `(a_{m-1}, ..., a_0)` of an index in base `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisIndex {
    pub d: usize,
    pub digits: Vec<usize>,
}

impl BasisIndex {
    pub fn new(d: usize, digits: Vec<usize>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(d));
        }
        if let Some(&bad) = digits.iter().find(|&&a| a >= d) {
            return Err(Error::Param {
                name: "digits".into(),
                reason: format!("digit {bad} out of range for d = {d}"),
            });
        }
        Ok(BasisIndex { d, digits })
    }

    pub fn m(&self) -> usize {
        self.digits.len()
    }
}

/// `sum_i a_i d^i`.
pub fn basis_index(b: &BasisIndex) -> usize {
    b.digits.iter().fold(0, |acc, &a| acc * b.d + a)
}

pub fn digits_of(index: usize, d: usize, m: usize) -> Result<BasisIndex> {
    let size = d.checked_pow(m as u32).ok_or_else(|| Error::Param {
        name: "m".into(),
        reason: "d^m overflows".into(),
    })?;
    if index >= size {
        return Err(Error::Param {
            name: "index".into(),
            reason: format!("{index} >= {d}^{m}"),
        });
    }
    let mut digits = vec![0; m];
    let mut k = index;
    for slot in digits.iter_mut().rev() {
        *slot = k % d;
        k /= d;
    }
    BasisIndex::new(d, digits)
}

/// `|a_{m-1} ... a_0>` as a product of red classical points.
pub fn basis_state(b: &BasisIndex) -> Result<Diagram> {
    let parts: Vec<Diagram> = b
        .digits
        .iter()
        .map(|&a| Diagram::x(b.d, (b.d - a) % b.d, 0, 1))
        .collect::<Result<_>>()?;
    Ok(Diagram::tensor_all(&parts))
}

/// Identity plus `a` at row `l`, column `d^m - 1`, where
/// `l = d^m - 1 - sum k_i d^{j_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowAdditionSpec {
    pub d: usize,
    pub m: usize,
    /// Digit positions `j_1 < ... < j_s`.
    pub positions: Vec<usize>,
    /// Multiplicities `k_i` in `1..d`.
    pub multiplicities: Vec<usize>,
    pub a: C64,
}

impl RowAdditionSpec {
    pub fn check(&self) -> Result<()> {
        let bad = |reason: String| Error::Param {
            name: "row addition".into(),
            reason,
        };
        if self.d < 2 {
            return Err(Error::Dimension(self.d));
        }
        if self.positions.is_empty() || self.positions.len() != self.multiplicities.len() {
            return Err(bad("need matching, non-empty positions and multiplicities".into()));
        }
        if self.positions.windows(2).any(|w| w[0] >= w[1]) || *self.positions.last().unwrap() >= self.m {
            return Err(bad(format!("positions {:?} not increasing below m = {}", self.positions, self.m)));
        }
        if self.multiplicities.iter().any(|&k| k == 0 || k >= self.d) {
            return Err(bad(format!("multiplicities {:?} outside 1..d", self.multiplicities)));
        }
        Ok(())
    }

    pub fn target_row(&self) -> usize {
        let shift: usize = self
            .positions
            .iter()
            .zip(&self.multiplicities)
            .map(|(&j, &k)| k * self.d.pow(j as u32))
            .sum();
        self.d.pow(self.m as u32) - 1 - shift
    }

    /// The spec whose target row is `l`.
    pub fn for_row(d: usize, m: usize, l: usize, a: C64) -> Result<Self> {
        let size = d.pow(m as u32);
        if l + 1 >= size {
            return Err(Error::Param {
                name: "l".into(),
                reason: format!("target row {l} must be below {}", size - 1),
            });
        }
        let digits = digits_of(size - 1 - l, d, m)?.digits;
        let (mut positions, mut multiplicities) = (Vec::new(), Vec::new());
        for j in 0..m {
            let k = digits[m - 1 - j];
            if k != 0 {
                positions.push(j);
                multiplicities.push(k);
            }
        }
        Ok(RowAdditionSpec {
            d,
            m,
            positions,
            multiplicities,
            a,
        })
    }
}

/// Copies every wire into a triangle feeding one coefficient spider. The
/// coefficient spider is `(0, ..., 0, c)`, so it fires only when every wire
/// is `d - 1`; it then sends `d - 1` down `k` extra legs into a red spider
/// on each listed wire, shifting that wire by `-k`.
fn controlled_gadget(d: usize, m: usize, coeff: PhaseVector, shifts: &[(usize, usize)]) -> Result<Diagram> {
    let mut g = Graph::new(d);
    let ones = PhaseVector::ones(d);
    let emitted: usize = shifts.iter().map(|s| s.1).sum();
    let c = g.node(GeneratorKind::z(coeff), m, emitted)?;
    let mut leg = 0;
    let mut tails = Vec::new();
    for w in 0..m {
        let copy = g.node(GeneratorKind::z(ones.clone()), 1, 2)?;
        let tri = g.node(GeneratorKind::Triangle, 1, 1)?;
        g.input(inp(copy, 0));
        g.wire(out(copy, 1), inp(tri, 0));
        g.wire(out(tri, 0), inp(c, w));
        let mut tail = out(copy, 0);
        if let Some(&(_, k)) = shifts.iter().find(|s| s.0 == w) {
            let red = g.node(GeneratorKind::x(0), 1 + k, 1)?;
            g.wire(tail, inp(red, 0));
            for e in 0..k {
                g.wire(out(c, leg), inp(red, 1 + e));
                leg += 1;
            }
            tail = out(red, 0);
        }
        tails.push(tail);
    }
    for t in tails {
        g.output(t);
    }
    Ok(g.finish())
}

pub fn row_addition_diagram(spec: &RowAdditionSpec) -> Result<Diagram> {
    spec.check()?;
    let shifts: Vec<(usize, usize)> = spec
        .positions
        .iter()
        .zip(&spec.multiplicities)
        .map(|(&j, &k)| (spec.m - 1 - j, k))
        .collect();
    controlled_gadget(spec.d, spec.m, PhaseVector::last(spec.d, spec.a), &shifts)
}

/// `diag(1, ..., 1, a)` on `m` wires.
pub fn row_mult_diagram(d: usize, m: usize, a: C64) -> Result<Diagram> {
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    match m {
        0 => Err(Error::Param {
            name: "m".into(),
            reason: "row multiplication needs m >= 1".into(),
        }),
        1 => Diagram::z(PhaseVector::ones_then(d, a), 1, 1),
        _ => controlled_gadget(d, m, PhaseVector::last(d, a - 1.0), &[]),
    }
}

fn check_len(v: &[C64], d: usize, m: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    let size = d.checked_pow(m as u32).ok_or_else(|| Error::Param {
        name: "m".into(),
        reason: "d^m overflows".into(),
    })?;
    if v.len() != size {
        return Err(Error::Length {
            expected: size,
            got: v.len(),
        });
    }
    if m == 0 {
        return Err(Error::Param {
            name: "m".into(),
            reason: "vectors need m >= 1".into(),
        });
    }
    Ok(size)
}

/// The row additions of the vector normal form, by increasing target row.
pub fn vector_normal_form_specs(v: &[C64], d: usize, m: usize) -> Result<Vec<RowAdditionSpec>> {
    let size = check_len(v, d, m)?;
    (0..size - 1)
        .map(|l| RowAdditionSpec::for_row(d, m, l, v[l]))
        .collect()
}

/// `|d-1>^m`, then `d^m - 1` row additions, then one row multiplication.
pub fn vector_normal_form(v: &[C64], d: usize, m: usize) -> Result<Diagram> {
    let size = check_len(v, d, m)?;
    let mut parts = vec![basis_state(&BasisIndex::new(d, vec![d - 1; m])?)?];
    for spec in vector_normal_form_specs(v, d, m)? {
        parts.push(row_addition_diagram(&spec)?);
    }
    parts.push(row_mult_diagram(d, m, v[size - 1])?);
    seq(&parts)
}

/// Closed diagram worth `a`.
pub fn scalar_normal_form(a: C64, d: usize) -> Result<Diagram> {
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    seq(&[Diagram::x(d, 1, 0, 1)?, Diagram::z(PhaseVector::last(d, a), 1, 0)?])
}

/// A W spider hands `|d-1>` to exactly one of `d^m` green boxes; box `j`
/// carries `a_j` and wires `d - k_i` legs into the red spider of wire `i`,
/// where `k_i` is digit `i` of `j`.
pub fn w_normal_form(v: &[C64], d: usize, m: usize) -> Result<Diagram> {
    let size = check_len(v, d, m)?;
    let mut g = Graph::new(d);
    let point = g.node(GeneratorKind::x(1), 0, 1)?;
    let w = g.node(GeneratorKind::WSpider, 1, size)?;
    g.wire(out(point, 0), inp(w, 0));
    let mut legs_per_wire = vec![0; m];
    let mut boxes = Vec::with_capacity(size);
    for (j, &a) in v.iter().enumerate() {
        let digits = digits_of(j, d, m)?.digits;
        let legs: Vec<usize> = digits.iter().map(|&k| (d - k) % d).collect();
        for (wire, &n) in legs.iter().enumerate() {
            legs_per_wire[wire] += n;
        }
        let total: usize = legs.iter().sum();
        let b = g.node(GeneratorKind::z(PhaseVector::last(d, a)), 1, total)?;
        g.wire(out(w, j), inp(b, 0));
        boxes.push((b, legs));
    }
    let reds: Vec<_> = legs_per_wire
        .iter()
        .map(|&n| g.node(GeneratorKind::x(0), n, 1))
        .collect::<Result<_>>()?;
    let mut filled = vec![0; m];
    for (b, legs) in &boxes {
        let mut port = 0;
        for (wire, &n) in legs.iter().enumerate() {
            for _ in 0..n {
                g.wire(out(*b, port), inp(reds[wire], filled[wire]));
                port += 1;
                filled[wire] += 1;
            }
        }
    }
    for &r in &reds {
        g.output(out(r, 0));
    }
    Ok(g.finish())
}

/// `s x t` matrix as the vector normal form of its row-major flattening on
/// one wire of dimension `st`, split into `(s, t)` with the `t` half bent
/// round to become the input.
pub fn matrix_normal_form(mat: &Matrix) -> Result<Diagram> {
    let (s, t) = (mat.rows, mat.cols);
    if s == 0 || t == 0 {
        return Err(Error::Param {
            name: "matrix".into(),
            reason: "rows and cols must be positive".into(),
        });
    }
    if s * t == 1 {
        let nf = scalar_normal_form(mat.data[0], 2)?;
        return Ok(nf.compose_par(&Diagram::identity(&[1])));
    }
    let vec_nf = vector_normal_form(&mat.data, s * t, 1)?;
    let split = vec_nf.compose_seq(&Diagram::splitter(s, t)?)?;
    let bent = split.compose_par(&Diagram::identity(&[t]));
    bent.compose_seq(&Diagram::identity(&[s]).compose_par(&Diagram::cup(t)))
}

/// Number of row-addition gadgets: green spiders fed by a triangle output
/// that also reach a red spider.
pub fn count_row_additions(d: &Diagram) -> usize {
    d.nodes()
        .iter()
        .filter(|(&id, n)| {
            if !matches!(n.kind, GeneratorKind::ZSpider { .. }) {
                return false;
            }
            let mut from_triangle = false;
            let mut to_red = false;
            for p in n.ports() {
                if let Some(End::Node { node, port }) = d.across(End::node(id, p)) {
                    match d.node(node).map(|x| &x.kind) {
                        Some(GeneratorKind::Triangle) if matches!(port, Port::Out(_)) => from_triangle = true,
                        Some(GeneratorKind::XSpider { .. }) => to_red = true,
                        _ => {}
                    }
                }
            }
            from_triangle && to_red
        })
        .count()
}
