//! Small combinators for writing rule sides.

use num_complex::Complex64 as C64;

use crate::diagram::{Diagram, End, NodeId, Port};
use crate::error::Result;
use crate::generator::GeneratorKind;
use crate::phase::PhaseVector;

/// Sequential composition, first element applied first.
pub fn seq(parts: &[Diagram]) -> Result<Diagram> {
    let mut it = parts.iter();
    let mut acc = it.next().cloned().unwrap_or_default();
    for p in it {
        acc = acc.compose_seq(p)?;
    }
    Ok(acc)
}

pub fn par(parts: &[Diagram]) -> Diagram {
    Diagram::tensor_all(parts)
}

pub fn id(d: usize) -> Diagram {
    Diagram::identity(&[d])
}

pub fn ids(d: usize, n: usize) -> Diagram {
    Diagram::identity(&vec![d; n])
}

/// `n` parallel copies.
pub fn pow(part: &Diagram, n: usize) -> Diagram {
    par(&vec![part.clone(); n])
}

pub fn z(phase: &PhaseVector, n_in: usize, n_out: usize) -> Result<Diagram> {
    Diagram::z(phase.clone(), n_in, n_out)
}

pub fn z1(d: usize, n_in: usize, n_out: usize) -> Result<Diagram> {
    Diagram::z(PhaseVector::ones(d), n_in, n_out)
}

pub fn x(d: usize, j: usize, n_in: usize, n_out: usize) -> Result<Diagram> {
    Diagram::x(d, j, n_in, n_out)
}

/// A 0-legged Z spider worth `c`.
pub fn gadget(d: usize, c: C64) -> Result<Diagram> {
    Diagram::z(PhaseVector::scalar(d, c), 0, 0)
}

/// `H` scaled by the `s` gadget, worth `H / d`.
pub fn dbox(d: usize) -> Result<Diagram> {
    Ok(Diagram::h(d)?.compose_par(&Diagram::z(PhaseVector::s(d), 0, 0)?))
}

pub fn dbox_dagger(d: usize) -> Result<Diagram> {
    Ok(dbox(d)?.adjoint())
}

/// `|k> -> |-k>`: a two-output `K_0` spider with its first leg bent down.
pub fn antipode(d: usize) -> Result<Diagram> {
    let mut g = Diagram::empty();
    let n = g.add_node(GeneratorKind::x(0), d, 0, 2)?;
    let i = g.push_input(d);
    let o = g.push_output(d);
    g.add_edge(End::Input(i), End::node(n, Port::Out(0)), d);
    g.add_edge(End::node(n, Port::Out(1)), End::Output(o), d);
    Ok(g)
}

pub fn t_transpose(d: usize) -> Result<Diagram> {
    Ok(Diagram::triangle(d)?.transpose())
}

pub fn t_inv_transpose(d: usize) -> Result<Diagram> {
    Ok(Diagram::triangle_inv(d)?.transpose())
}

/// `Z(1)` merge of two copies of the wire through `f` and `g`:
/// column-wise entrywise product of the two maps.
pub fn hadamard_product(d: usize, f: &Diagram, g: &Diagram) -> Result<Diagram> {
    seq(&[z1(d, 1, 2)?, par(&[f.clone(), g.clone()]), z1(d, 2, 1)?])
}

pub fn scalar_nf(d: usize, a: C64) -> Result<Diagram> {
    seq(&[x(d, 1, 0, 1)?, z(&PhaseVector::last(d, a), 1, 0)?])
}

/// Incremental builder for diagrams whose wiring is easier to state as a
/// graph than as a composite.
pub struct Graph {
    pub g: Diagram,
    d: usize,
}

impl Graph {
    pub fn new(d: usize) -> Self {
        Graph {
            g: Diagram::empty(),
            d,
        }
    }

    pub fn node(&mut self, kind: GeneratorKind, n_in: usize, n_out: usize) -> Result<NodeId> {
        self.g.add_node(kind, self.d, n_in, n_out)
    }

    pub fn wire(&mut self, a: End, b: End) {
        self.g.add_edge(a, b, self.d);
    }

    pub fn input(&mut self, to: End) {
        let i = self.g.push_input(self.d);
        self.g.add_edge(End::Input(i), to, self.d);
    }

    pub fn output(&mut self, from: End) {
        let o = self.g.push_output(self.d);
        self.g.add_edge(from, End::Output(o), self.d);
    }

    pub fn finish(self) -> Diagram {
        self.g
    }
}

pub fn inp(n: NodeId, p: usize) -> End {
    End::node(n, Port::In(p))
}

pub fn out(n: NodeId, p: usize) -> End {
    End::node(n, Port::Out(p))
}
