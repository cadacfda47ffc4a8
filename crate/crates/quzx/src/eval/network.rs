//! Turns a diagram into a list of small dense factors over shared indices.
//!
//! Large spiders are never materialized whole. Parallel wires between a Z
//! spider and another Z or X spider are merged (the Z side forces every
//! wire in the bundle to carry the same value), and spiders with more than
//! three legs are split into chains of three-legged spiders. Both steps
//! are exact.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::diagram::{Diagram, End, Port};
use crate::eval::kind::{interpret_kind, w_tensor, x_tensor, z_tensor};
use crate::generator::GeneratorKind;
use crate::tensor::DenseTensor;

pub(crate) type Idx = usize;

#[derive(Debug, Clone)]
enum Proto {
    Z { weights: Vec<C64>, legs: Vec<Idx> },
    X { d: usize, label: usize, legs: Vec<(Idx, i64)> },
    W { d: usize, ins: Vec<Idx>, outs: Vec<Idx> },
    Dense { tensor: DenseTensor, legs: Vec<Idx> },
}

impl Proto {
    fn indices(&self) -> Vec<Idx> {
        match self {
            Proto::Z { legs, .. } | Proto::Dense { legs, .. } => legs.clone(),
            Proto::X { legs, .. } => legs.iter().map(|l| l.0).collect(),
            Proto::W { ins, outs, .. } => outs.iter().chain(ins).copied().collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Factor {
    pub indices: Vec<Idx>,
    pub tensor: DenseTensor,
}

/// The factorized network of a diagram.
#[derive(Debug, Clone)]
pub(crate) struct Network {
    pub factors: Vec<Factor>,
    pub dims: Vec<usize>,
    /// Free index of each output slot, then each input slot.
    pub free: Vec<Idx>,
    pub scalar: C64,
}

struct Builder {
    dims: Vec<usize>,
}

impl Builder {
    fn fresh(&mut self, dim: usize) -> Idx {
        self.dims.push(dim);
        self.dims.len() - 1
    }
}

/// Number of entries a proto would occupy once materialized.
fn dense_size(dims: &[usize], idx: &[Idx]) -> u128 {
    idx.iter().map(|&i| dims[i] as u128).product()
}

pub(crate) fn build(diagram: &Diagram) -> Network {
    let mut b = Builder { dims: Vec::new() };
    let mut port_idx: BTreeMap<(usize, Port), Idx> = BTreeMap::new();
    let mut free_out = vec![usize::MAX; diagram.outputs().len()];
    let mut free_in = vec![usize::MAX; diagram.inputs().len()];
    let mut protos: Vec<Proto> = Vec::new();

    for e in diagram.edges() {
        if e.a.is_boundary() && e.b.is_boundary() {
            // a bare wire becomes an explicit delta
            let x = b.fresh(e.dim);
            let y = b.fresh(e.dim);
            for (end, i) in [(e.a, x), (e.b, y)] {
                match end {
                    End::Input(s) => free_in[s] = i,
                    End::Output(s) => free_out[s] = i,
                    End::Node { .. } => unreachable!(),
                }
            }
            protos.push(Proto::Dense {
                tensor: DenseTensor::identity(e.dim),
                legs: vec![x, y],
            });
            continue;
        }
        let x = b.fresh(e.dim);
        for end in [e.a, e.b] {
            match end {
                End::Input(s) => free_in[s] = x,
                End::Output(s) => free_out[s] = x,
                End::Node { node, port } => {
                    port_idx.insert((node, port), x);
                }
            }
        }
    }

    for (&id, node) in diagram.nodes() {
        let outs: Vec<Idx> = (0..node.n_out).map(|o| port_idx[&(id, Port::Out(o))]).collect();
        let ins: Vec<Idx> = (0..node.n_in).map(|i| port_idx[&(id, Port::In(i))]).collect();
        let d = node.dim;
        let proto = match &node.kind {
            GeneratorKind::ZSpider { phase } => Proto::Z {
                weights: (0..d).map(|j| phase.weight(j)).collect(),
                legs: outs.iter().chain(&ins).copied().collect(),
            },
            GeneratorKind::XSpider { label } => Proto::X {
                d,
                label: *label,
                legs: outs
                    .iter()
                    .map(|&i| (i, 1))
                    .chain(ins.iter().map(|&i| (i, -1)))
                    .collect(),
            },
            GeneratorKind::WSpider => Proto::W { d, ins, outs },
            kind => Proto::Dense {
                tensor: interpret_kind(kind, d, node.n_in, node.n_out)
                    .expect("validated diagram"),
                legs: outs.iter().chain(&ins).copied().collect(),
            },
        };
        protos.push(proto);
    }

    simplify_protos(&mut protos);
    let protos = split_protos(protos, &mut b);

    let mut free = free_out;
    free.extend(free_in);
    let mut count = vec![0usize; b.dims.len()];
    for p in &protos {
        for i in p.indices() {
            count[i] += 1;
        }
    }
    for &f in &free {
        count[f] += 1;
    }
    let factors = protos
        .into_iter()
        .map(|p| materialize(p, &b.dims, &count))
        .collect();
    Network {
        factors,
        dims: b.dims,
        free,
        scalar: diagram.scalar(),
    }
}

/// Self-loops and parallel bundles on Z spiders.
fn simplify_protos(protos: &mut [Proto]) {
    // Z self-loops vanish; X self-loops become a single leg with the
    // summed coefficient.
    for p in protos.iter_mut() {
        match p {
            Proto::Z { legs, .. } => {
                let mut seen: BTreeMap<Idx, usize> = BTreeMap::new();
                for &l in legs.iter() {
                    *seen.entry(l).or_default() += 1;
                }
                legs.retain(|l| seen[l] == 1);
            }
            Proto::X { legs, .. } => {
                let mut merged: Vec<(Idx, i64)> = Vec::new();
                for &(i, c) in legs.iter() {
                    match merged.iter_mut().find(|m| m.0 == i) {
                        Some(m) => m.1 += c,
                        None => merged.push((i, c)),
                    }
                }
                *legs = merged;
            }
            _ => {}
        }
    }

    // Bundles: a Z spider sharing two or more indices with a Z or X spider.
    let n = protos.len();
    for zi in 0..n {
        if !matches!(protos[zi], Proto::Z { .. }) {
            continue;
        }
        for other in 0..n {
            if other == zi {
                continue;
            }
            let zlegs = match &protos[zi] {
                Proto::Z { legs, .. } => legs.clone(),
                _ => unreachable!(),
            };
            let oidx = protos[other].indices();
            let shared: Vec<Idx> = zlegs.iter().copied().filter(|l| oidx.contains(l)).collect();
            if shared.len() < 2 {
                continue;
            }
            let keep = shared[0];
            let drop: Vec<Idx> = shared[1..].to_vec();
            match &mut protos[other] {
                Proto::Z { legs, .. } => legs.retain(|l| !drop.contains(l)),
                Proto::X { legs, d, .. } => {
                    let total: i64 = legs
                        .iter()
                        .filter(|l| shared.contains(&l.0))
                        .map(|l| l.1)
                        .sum();
                    legs.retain(|l| !drop.contains(&l.0));
                    for l in legs.iter_mut() {
                        if l.0 == keep {
                            l.1 = total.rem_euclid(*d as i64);
                        }
                    }
                }
                _ => continue,
            }
            if let Proto::Z { legs, .. } = &mut protos[zi] {
                legs.retain(|l| !drop.contains(l));
            }
        }
    }
}

fn split_protos(protos: Vec<Proto>, b: &mut Builder) -> Vec<Proto> {
    let mut out = Vec::new();
    for p in protos {
        match p {
            Proto::Z { weights, legs } if legs.len() > 3 => {
                let d = weights.len();
                let ones = vec![C64::new(1.0, 0.0); d];
                let mut link = b.fresh(d);
                out.push(Proto::Z {
                    weights,
                    legs: vec![legs[0], legs[1], link],
                });
                let n = legs.len();
                for k in 2..n - 2 {
                    let next = b.fresh(d);
                    out.push(Proto::Z {
                        weights: ones.clone(),
                        legs: vec![link, legs[k], next],
                    });
                    link = next;
                }
                out.push(Proto::Z {
                    weights: ones,
                    legs: vec![link, legs[n - 2], legs[n - 1]],
                });
            }
            Proto::X { d, label, legs } if legs.len() > 3 => {
                let mut link = b.fresh(d);
                out.push(Proto::X {
                    d,
                    label,
                    legs: vec![legs[0], legs[1], (link, 1)],
                });
                let n = legs.len();
                for k in 2..n - 2 {
                    let next = b.fresh(d);
                    out.push(Proto::X {
                        d,
                        label: 0,
                        legs: vec![(link, -1), legs[k], (next, 1)],
                    });
                    link = next;
                }
                out.push(Proto::X {
                    d,
                    label: 0,
                    legs: vec![(link, -1), legs[n - 2], legs[n - 1]],
                });
            }
            Proto::W { d, ins, outs } if ins.len() + outs.len() > 3 => {
                if ins.is_empty() || outs.is_empty() {
                    // only the all-zero entry survives
                    for l in ins.iter().chain(&outs) {
                        let mut t = DenseTensor::zeros(vec![d]);
                        t.data[0] = C64::new(1.0, 0.0);
                        out.push(Proto::Dense {
                            tensor: t,
                            legs: vec![*l],
                        });
                    }
                    continue;
                }
                if outs.len() == 1 {
                    w_merge_chain(d, &ins, outs[0], b, &mut out);
                } else if ins.len() == 1 {
                    w_copy_chain(d, ins[0], &outs, b, &mut out);
                } else {
                    let mid = b.fresh(d);
                    w_merge_chain(d, &ins, mid, b, &mut out);
                    w_copy_chain(d, mid, &outs, b, &mut out);
                }
            }
            other => out.push(other),
        }
    }
    out
}

/// `ins -> mid` as a chain of two-input W spiders.
fn w_merge_chain(d: usize, ins: &[Idx], mid: Idx, b: &mut Builder, out: &mut Vec<Proto>) {
    let mut target = mid;
    let n = ins.len();
    for k in 0..n - 2 {
        let next = b.fresh(d);
        out.push(Proto::W {
            d,
            ins: vec![ins[k], next],
            outs: vec![target],
        });
        target = next;
    }
    out.push(Proto::W {
        d,
        ins: vec![ins[n - 2], ins[n - 1]],
        outs: vec![target],
    });
}

/// `mid -> outs` as a chain of two-output W spiders.
fn w_copy_chain(d: usize, mid: Idx, outs: &[Idx], b: &mut Builder, out: &mut Vec<Proto>) {
    let mut source = mid;
    let n = outs.len();
    for k in 0..n - 2 {
        let next = b.fresh(d);
        out.push(Proto::W {
            d,
            ins: vec![source],
            outs: vec![outs[k], next],
        });
        source = next;
    }
    out.push(Proto::W {
        d,
        ins: vec![source],
        outs: vec![outs[n - 2], outs[n - 1]],
    });
}

pub(crate) fn proto_sizes(diagram: &Diagram) -> u128 {
    let net = build(diagram);
    net.factors
        .iter()
        .map(|f| dense_size(&net.dims, &f.indices))
        .max()
        .unwrap_or(1)
}

fn materialize(p: Proto, dims: &[usize], count: &[usize]) -> Factor {
    let (indices, tensor) = match p {
        Proto::Z { weights, legs } => {
            let t = z_tensor(&weights, legs.len());
            (legs, t)
        }
        Proto::X { d, label, legs } => {
            let coeffs: Vec<i64> = legs.iter().map(|l| l.1).collect();
            let t = x_tensor(d, label, &coeffs);
            (legs.into_iter().map(|l| l.0).collect(), t)
        }
        Proto::W { d, ins, outs } => {
            let t = w_tensor(d, ins.len(), outs.len());
            (outs.into_iter().chain(ins).collect(), t)
        }
        Proto::Dense { tensor, legs } => (legs, tensor),
    };
    let f = trace_duplicates(Factor { indices, tensor });
    sum_dangling(f, dims, count)
}

/// Contracts repeated indices within one factor (self-loops).
fn trace_duplicates(f: Factor) -> Factor {
    let mut f = f;
    loop {
        let dup = (0..f.indices.len()).find_map(|a| {
            (a + 1..f.indices.len())
                .find(|&b| f.indices[b] == f.indices[a])
                .map(|b| (a, b))
        });
        let Some((a, b)) = dup else { return f };
        let n = f.indices.len();
        let mut perm: Vec<usize> = (0..n).filter(|&k| k != a && k != b).collect();
        perm.push(a);
        perm.push(b);
        let t = f.tensor.permute(&perm);
        let dim = f.tensor.axis_dims[a];
        let rest: usize = t.len() / (dim * dim);
        let mut data = vec![C64::new(0.0, 0.0); rest];
        for (r, slot) in data.iter_mut().enumerate() {
            for j in 0..dim {
                *slot += t.data[r * dim * dim + j * dim + j];
            }
        }
        let new_idx: Vec<Idx> = perm[..n - 2].iter().map(|&k| f.indices[k]).collect();
        let new_dims: Vec<usize> = perm[..n - 2].iter().map(|&k| f.tensor.axis_dims[k]).collect();
        f = Factor {
            indices: new_idx,
            tensor: DenseTensor {
                axis_dims: new_dims,
                data,
            },
        };
    }
}

/// Sums out indices that no other factor or boundary slot refers to.
fn sum_dangling(f: Factor, _dims: &[usize], count: &[usize]) -> Factor {
    let mut f = f;
    while let Some(a) = f.indices.iter().position(|&i| count[i] == 1) {
        let n = f.indices.len();
        let mut perm: Vec<usize> = (0..n).filter(|&k| k != a).collect();
        perm.push(a);
        let t = f.tensor.permute(&perm);
        let dim = f.tensor.axis_dims[a];
        let rest = t.len() / dim;
        let data: Vec<C64> = (0..rest)
            .map(|r| t.data[r * dim..(r + 1) * dim].iter().sum())
            .collect();
        f = Factor {
            indices: perm[..n - 1].iter().map(|&k| f.indices[k]).collect(),
            tensor: DenseTensor {
                axis_dims: perm[..n - 1].iter().map(|&k| f.tensor.axis_dims[k]).collect(),
                data,
            },
        };
    }
    f
}
