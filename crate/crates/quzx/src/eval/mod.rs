//! The standard interpretation of diagrams as dense tensors.

mod kind;
mod network;

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use kind::interpret_kind;

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::tensor::{matmul, DenseTensor};
use network::{Factor, Network};

/// Default peak size of any intermediate tensor, in complex entries.
pub const DEFAULT_CAP: u128 = 1 << 24;

/// Reads `QUZX_CAP` when set, otherwise [`DEFAULT_CAP`].
pub fn default_cap() -> u128 {
    std::env::var("QUZX_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// A pairwise contraction order. Factors are numbered `0..initial` in build
/// order; step `k` produces factor `initial + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub initial: usize,
    pub steps: Vec<(usize, usize)>,
    pub peak: u128,
}

#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub cap: u128,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { cap: default_cap() }
    }
}

struct Shape {
    indices: Vec<usize>,
}

fn result_indices(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .filter(|i| !b.contains(i))
        .chain(b.iter().filter(|i| !a.contains(i)))
        .copied()
        .collect()
}

fn size_of(dims: &[usize], idx: &[usize]) -> u128 {
    idx.iter().map(|&i| dims[i] as u128).product()
}

impl Evaluator {
    pub fn new(cap: u128) -> Self {
        Evaluator { cap }
    }

    /// Greedy plan: always contract the pair of factors that share an index
    /// and give the smallest result; ties go to the lowest factor ids.
    /// Disconnected pieces are joined by outer products at the end.
    pub fn plan(&self, diagram: &Diagram) -> Result<ContractionPlan> {
        diagram.ensure_valid()?;
        let net = network::build(diagram);
        self.plan_network(&net, |cands| cands[0])
    }

    /// A legal plan choosing uniformly among the connected pairs.
    pub fn random_plan<R: Rng>(&self, diagram: &Diagram, rng: &mut R) -> Result<ContractionPlan> {
        diagram.ensure_valid()?;
        let net = network::build(diagram);
        self.plan_network(&net, |cands| cands[rng.gen_range(0..cands.len())])
    }

    fn plan_network<F>(&self, net: &Network, mut pick: F) -> Result<ContractionPlan>
    where
        F: FnMut(&[(u128, usize, usize)]) -> (u128, usize, usize),
    {
        let dims = &net.dims;
        let mut live: BTreeSet<usize> = (0..net.factors.len()).collect();
        let mut shapes: Vec<Shape> = net
            .factors
            .iter()
            .map(|f| Shape {
                indices: f.indices.clone(),
            })
            .collect();
        let mut peak = 1u128;
        for (k, s) in shapes.iter().enumerate() {
            let size = size_of(dims, &s.indices);
            if size > self.cap {
                return Err(Error::CapExceeded {
                    step: k,
                    size,
                    cap: self.cap,
                });
            }
            peak = peak.max(size);
        }
        // owner[idx] = factors currently holding idx
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); dims.len()];
        for (k, s) in shapes.iter().enumerate() {
            for &i in &s.indices {
                if !owners[i].contains(&k) {
                    owners[i].push(k);
                }
            }
        }
        let mut steps = Vec::new();
        while live.len() > 1 {
            let mut cands: Vec<(u128, usize, usize)> = Vec::new();
            let mut seen = BTreeSet::new();
            for &f in &live {
                for &i in &shapes[f].indices {
                    for &g in &owners[i] {
                        if g > f && seen.insert((f, g)) {
                            let r = result_indices(&shapes[f].indices, &shapes[g].indices);
                            cands.push((size_of(dims, &r), f, g));
                        }
                    }
                }
            }
            let (size, a, b) = if cands.is_empty() {
                let mut it = live.iter();
                let a = *it.next().unwrap();
                let b = *it.next().unwrap();
                let r = result_indices(&shapes[a].indices, &shapes[b].indices);
                (size_of(dims, &r), a, b)
            } else {
                cands.sort();
                pick(&cands)
            };
            if size > self.cap {
                return Err(Error::CapExceeded {
                    step: steps.len(),
                    size,
                    cap: self.cap,
                });
            }
            peak = peak.max(size);
            let r = result_indices(&shapes[a].indices, &shapes[b].indices);
            let new = shapes.len();
            for &i in shapes[a].indices.iter().chain(&shapes[b].indices) {
                owners[i].retain(|&o| o != a && o != b);
            }
            for &i in &r {
                owners[i].push(new);
            }
            shapes.push(Shape { indices: r });
            live.remove(&a);
            live.remove(&b);
            live.insert(new);
            steps.push((a, b));
        }
        Ok(ContractionPlan {
            initial: net.factors.len(),
            steps,
            peak,
        })
    }

    pub fn interpret(&self, diagram: &Diagram) -> Result<DenseTensor> {
        let plan = self.plan(diagram)?;
        self.interpret_with_plan(diagram, &plan)
    }

    /// Executes an explicit plan; the plan must come from the same diagram.
    pub fn interpret_with_plan(&self, diagram: &Diagram, plan: &ContractionPlan) -> Result<DenseTensor> {
        diagram.ensure_valid()?;
        let net = network::build(diagram);
        if plan.initial != net.factors.len() {
            return Err(Error::Invalid("plan does not match diagram".into()));
        }
        let mut slots: Vec<Option<Factor>> = net.factors.into_iter().map(Some).collect();
        for (k, &(a, b)) in plan.steps.iter().enumerate() {
            let fa = slots.get_mut(a).and_then(Option::take);
            let fb = slots.get_mut(b).and_then(Option::take);
            let (Some(fa), Some(fb)) = (fa, fb) else {
                return Err(Error::Invalid(format!("plan step {k} reuses a factor")));
            };
            let r = result_indices(&fa.indices, &fb.indices);
            let size = size_of(&net.dims, &r);
            if size > self.cap {
                return Err(Error::CapExceeded {
                    step: k,
                    size,
                    cap: self.cap,
                });
            }
            slots.push(Some(contract(&fa, &fb)));
        }
        let mut rest: Vec<Factor> = slots.into_iter().flatten().collect();
        let mut result = match rest.len() {
            0 => Factor {
                indices: Vec::new(),
                tensor: DenseTensor::scalar(C64::new(1.0, 0.0)),
            },
            1 => rest.pop().unwrap(),
            _ => return Err(Error::Invalid("plan leaves several factors".into())),
        };
        // Free indices that are shared by two boundary slots only occur for
        // bare wires, which were given their own delta factors.
        let perm: Vec<usize> = net
            .free
            .iter()
            .map(|f| result.indices.iter().position(|i| i == f).expect("free index survives"))
            .collect();
        result.tensor = result.tensor.permute(&perm);
        Ok(result.tensor.scale(net.scalar))
    }
}

/// Contracts all indices shared by the two factors.
fn contract(a: &Factor, b: &Factor) -> Factor {
    let shared: Vec<usize> = a.indices.iter().copied().filter(|i| b.indices.contains(i)).collect();
    let a_free: Vec<usize> = (0..a.indices.len()).filter(|&k| !shared.contains(&a.indices[k])).collect();
    let b_free: Vec<usize> = (0..b.indices.len()).filter(|&k| !shared.contains(&b.indices[k])).collect();
    let a_sh: Vec<usize> = shared.iter().map(|s| a.indices.iter().position(|i| i == s).unwrap()).collect();
    let b_sh: Vec<usize> = shared.iter().map(|s| b.indices.iter().position(|i| i == s).unwrap()).collect();

    let pa: Vec<usize> = a_free.iter().chain(&a_sh).copied().collect();
    let pb: Vec<usize> = b_sh.iter().chain(&b_free).copied().collect();
    let ta = a.tensor.permute(&pa);
    let tb = b.tensor.permute(&pb);
    let n: usize = a_free.iter().map(|&k| a.tensor.axis_dims[k]).product();
    let k: usize = a_sh.iter().map(|&k| a.tensor.axis_dims[k]).product();
    let m: usize = b_free.iter().map(|&k| b.tensor.axis_dims[k]).product();
    let data = matmul(&ta.data, &tb.data, n, k, m);
    let indices: Vec<usize> = a_free
        .iter()
        .map(|&k| a.indices[k])
        .chain(b_free.iter().map(|&k| b.indices[k]))
        .collect();
    let axis_dims: Vec<usize> = a_free
        .iter()
        .map(|&k| a.tensor.axis_dims[k])
        .chain(b_free.iter().map(|&k| b.tensor.axis_dims[k]))
        .collect();
    Factor {
        indices,
        tensor: DenseTensor { axis_dims, data },
    }
}

/// Interprets with the default cap.
pub fn interpret(diagram: &Diagram) -> Result<DenseTensor> {
    Evaluator::default().interpret(diagram)
}

/// Greedy contraction plan with the default cap.
pub fn plan_contraction(diagram: &Diagram) -> Result<ContractionPlan> {
    Evaluator::default().plan(diagram)
}

/// Largest single factor the evaluator will materialize before contracting.
pub fn largest_factor(diagram: &Diagram) -> u128 {
    network::proto_sizes(diagram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::GeneratorKind;
    use crate::phase::PhaseVector;
    use crate::tensor::approx_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kinds(d: usize) -> Vec<GeneratorKind> {
        let ph = PhaseVector::from_angles(&(1..d).map(|k| 0.3 * k as f64).collect::<Vec<_>>());
        vec![
            GeneratorKind::z(ph),
            GeneratorKind::x(0),
            GeneratorKind::x(d - 1),
            GeneratorKind::WSpider,
        ]
    }

    #[test]
    fn network_matches_direct_tensor() {
        for d in 2..=3 {
            for kind in kinds(d) {
                for n_in in 0..=3 {
                    for n_out in 0..=3 {
                        let dg = Diagram::generator(kind.clone(), d, n_in, n_out).unwrap();
                        let got = interpret(&dg).unwrap();
                        let want = interpret_kind(&kind, d, n_in, n_out).unwrap();
                        assert!(approx_eq(&got, &want, 1e-12), "{} d={d} {n_in}->{n_out}", kind.name());
                    }
                }
            }
        }
    }

    #[test]
    fn hadamard_pair_is_d_identity() {
        let d = 4;
        let dg = Diagram::h(d).unwrap().compose_seq(&Diagram::h_dagger(d).unwrap()).unwrap();
        let want = DenseTensor::identity(d).scale(C64::new(d as f64, 0.0));
        assert!(approx_eq(&interpret(&dg).unwrap(), &want, 1e-12));
    }

    #[test]
    fn random_plans_agree() {
        let d = 3;
        let a = Diagram::z(PhaseVector::from_angles(&[0.4, 1.1]), 2, 3).unwrap();
        let b = Diagram::x(d, 1, 3, 2).unwrap();
        let dg = a.compose_seq(&b).unwrap().compose_seq(&Diagram::w(d, 2, 2).unwrap()).unwrap();
        let ev = Evaluator::default();
        let want = ev.interpret(&dg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let plan = ev.random_plan(&dg, &mut rng).unwrap();
            assert!(approx_eq(&ev.interpret_with_plan(&dg, &plan).unwrap(), &want, 1e-12));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let dg = Diagram::z(PhaseVector::ones(3), 0, 8).unwrap();
        let err = Evaluator::new(100).interpret(&dg).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
