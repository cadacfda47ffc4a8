//! The diagram IR: generator nodes joined by dimension-labelled wires.
//!
//! Caps, cups, swaps and identities are not nodes. A wire between two
//! output slots is a cap, between two input slots a cup, and an input slot
//! wired straight to an output slot is an identity. Node ports are
//! undirected for evaluation purposes, so a wire may join an input port to
//! an input port (a bent wire).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::GeneratorKind;
use crate::phase::PhaseVector;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    In(usize),
    Out(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Node { node: NodeId, port: Port },
    Input(usize),
    Output(usize),
}

impl End {
    pub fn node(node: NodeId, port: Port) -> Self {
        End::Node { node, port }
    }

    pub fn node_id(&self) -> Option<NodeId> {
        match self {
            End::Node { node, .. } => Some(*node),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, End::Node { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: End,
    pub b: End,
    pub dim: usize,
}

impl Edge {
    pub fn new(a: End, b: End, dim: usize) -> Self {
        Edge { a, b, dim }
    }

    /// The end opposite to `e`, if `e` is one of this edge's ends.
    pub fn other(&self, e: End) -> Option<End> {
        if self.a == e {
            Some(self.b)
        } else if self.b == e {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.a.node_id() == Some(node) || self.b.node_id() == Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub kind: GeneratorKind,
    /// Wire dimension; `s*t` for binders and splitters.
    pub dim: usize,
    pub n_in: usize,
    pub n_out: usize,
}

impl Node {
    pub fn port_dim(&self, port: Port) -> Option<usize> {
        match port {
            Port::In(i) if i < self.n_in => Some(self.kind.input_dim(self.dim, i)),
            Port::Out(i) if i < self.n_out => Some(self.kind.output_dim(self.dim, i)),
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        self.n_in + self.n_out
    }

    pub fn ports(&self) -> impl Iterator<Item = Port> {
        (0..self.n_in)
            .map(Port::In)
            .chain((0..self.n_out).map(Port::Out))
    }
}

/// One invariant violation found by [`Diagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub invariant: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.subject, self.invariant)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub(crate) nodes: BTreeMap<NodeId, Node>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) inputs: Vec<usize>,
    pub(crate) outputs: Vec<usize>,
    pub(crate) scalar: C64,
    pub(crate) next_id: NodeId,
}

impl Default for Diagram {
    fn default() -> Self {
        Self::empty()
    }
}

impl Diagram {
    /// The empty diagram, interpreted as the scalar 1.
    pub fn empty() -> Self {
        Diagram {
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            scalar: C64::new(1.0, 0.0),
            next_id: 0,
        }
    }

    pub fn scalar_only(c: C64) -> Self {
        let mut d = Self::empty();
        d.scalar = c;
        d
    }

    /// A single generator with ordered boundaries: inputs wired to input
    /// ports, outputs to output ports.
    pub fn generator(kind: GeneratorKind, d: usize, n_in: usize, n_out: usize) -> Result<Self> {
        kind.check(d, n_in, n_out)?;
        let mut diag = Self::empty();
        let id = diag.add_node(kind, d, n_in, n_out)?;
        for i in 0..n_in {
            let dim = diag.nodes[&id].port_dim(Port::In(i)).unwrap();
            let slot = diag.push_input(dim);
            diag.add_edge(End::Input(slot), End::node(id, Port::In(i)), dim);
        }
        for o in 0..n_out {
            let dim = diag.nodes[&id].port_dim(Port::Out(o)).unwrap();
            let slot = diag.push_output(dim);
            diag.add_edge(End::node(id, Port::Out(o)), End::Output(slot), dim);
        }
        Ok(diag)
    }

    pub fn z(phase: PhaseVector, n_in: usize, n_out: usize) -> Result<Self> {
        let d = phase.len() + 1;
        Self::generator(GeneratorKind::z(phase), d, n_in, n_out)
    }

    pub fn x(d: usize, label: usize, n_in: usize, n_out: usize) -> Result<Self> {
        Self::generator(GeneratorKind::x(label), d, n_in, n_out)
    }

    pub fn h(d: usize) -> Result<Self> {
        Self::generator(GeneratorKind::H, d, 1, 1)
    }

    pub fn h_dagger(d: usize) -> Result<Self> {
        Self::generator(GeneratorKind::HDagger, d, 1, 1)
    }

    pub fn triangle(d: usize) -> Result<Self> {
        Self::generator(GeneratorKind::Triangle, d, 1, 1)
    }

    pub fn triangle_inv(d: usize) -> Result<Self> {
        Self::generator(GeneratorKind::TriangleInv, d, 1, 1)
    }

    pub fn w(d: usize, n_in: usize, n_out: usize) -> Result<Self> {
        Self::generator(GeneratorKind::WSpider, d, n_in, n_out)
    }

    pub fn binder(s: usize, t: usize) -> Result<Self> {
        Self::generator(GeneratorKind::DimBinder { s, t }, s * t, 2, 1)
    }

    pub fn splitter(s: usize, t: usize) -> Result<Self> {
        Self::generator(GeneratorKind::DimSplitter { s, t }, s * t, 1, 2)
    }

    /// Parallel identity wires of the given dimensions.
    pub fn identity(dims: &[usize]) -> Self {
        let mut diag = Self::empty();
        for &dim in dims {
            let i = diag.push_input(dim);
            let o = diag.push_output(dim);
            diag.add_edge(End::Input(i), End::Output(o), dim);
        }
        diag
    }

    /// `sum_j |jj>`.
    pub fn cap(dim: usize) -> Self {
        let mut diag = Self::empty();
        diag.outputs = vec![dim, dim];
        diag.add_edge(End::Output(0), End::Output(1), dim);
        diag
    }

    /// `sum_j <jj|`.
    pub fn cup(dim: usize) -> Self {
        let mut diag = Self::empty();
        diag.inputs = vec![dim, dim];
        diag.add_edge(End::Input(0), End::Input(1), dim);
        diag
    }

    /// Wire permutation: input `i` is routed to output `perm[i]`.
    pub fn permutation(dims: &[usize], perm: &[usize]) -> Result<Self> {
        if dims.len() != perm.len() {
            return Err(Error::Boundary("permutation length".into()));
        }
        let mut outputs = vec![0; dims.len()];
        let mut seen = vec![false; dims.len()];
        for (i, &p) in perm.iter().enumerate() {
            if p >= dims.len() || seen[p] {
                return Err(Error::Boundary("not a permutation".into()));
            }
            seen[p] = true;
            outputs[p] = dims[i];
        }
        let mut diag = Self::empty();
        diag.inputs = dims.to_vec();
        diag.outputs = outputs;
        for (i, &p) in perm.iter().enumerate() {
            diag.add_edge(End::Input(i), End::Output(p), dims[i]);
        }
        Ok(diag)
    }

    pub fn swap(d1: usize, d2: usize) -> Self {
        Self::permutation(&[d1, d2], &[1, 0]).expect("valid swap")
    }

    // ---- raw construction ----

    pub fn add_node(
        &mut self,
        kind: GeneratorKind,
        d: usize,
        n_in: usize,
        n_out: usize,
    ) -> Result<NodeId> {
        kind.check(d, n_in, n_out)?;
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(
            id,
            Node {
                kind,
                dim: d,
                n_in,
                n_out,
            },
        );
        Ok(id)
    }

    /// Inserts a node without checking generator constraints; used when
    /// reading untrusted input so that `validate` can report problems.
    pub fn insert_node_unchecked(&mut self, id: NodeId, node: Node) {
        self.next_id = self.next_id.max(id + 1);
        self.nodes.insert(id, node);
    }

    pub fn add_edge(&mut self, a: End, b: End, dim: usize) {
        self.edges.push(Edge::new(a, b, dim));
    }

    pub fn push_input(&mut self, dim: usize) -> usize {
        self.inputs.push(dim);
        self.inputs.len() - 1
    }

    pub fn push_output(&mut self, dim: usize) -> usize {
        self.outputs.push(dim);
        self.outputs.len() - 1
    }

    // ---- accessors ----

    pub fn nodes(&self) -> &BTreeMap<NodeId, Node> {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn scalar(&self) -> C64 {
        self.scalar
    }

    pub fn set_scalar(&mut self, c: C64) {
        self.scalar = c;
    }

    pub fn with_scalar(mut self, c: C64) -> Self {
        self.scalar *= c;
        self
    }

    pub fn next_id(&self) -> NodeId {
        self.next_id
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of edge ends attached to nodes.
    pub fn endpoint_count(&self) -> usize {
        self.edges
            .iter()
            .map(|e| (!e.a.is_boundary()) as usize + (!e.b.is_boundary()) as usize)
            .sum()
    }

    /// Index of the edge attached to `end`.
    pub fn edge_at(&self, end: End) -> Option<usize> {
        self.edges.iter().position(|e| e.a == end || e.b == end)
    }

    /// Indices of edges touching `node`; self-loops appear once.
    pub fn edges_of(&self, node: NodeId) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(node))
            .map(|(i, _)| i)
            .collect()
    }

    /// Distinct neighbouring node ids, in ascending order.
    pub fn neighbours(&self, node: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter(|e| e.touches(node))
            .filter_map(|e| {
                if e.a.node_id() == Some(node) {
                    e.b.node_id()
                } else {
                    e.a.node_id()
                }
            })
            .filter(|&n| n != node)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The end across the wire attached to `end`.
    pub fn across(&self, end: End) -> Option<End> {
        self.edges.iter().find_map(|e| e.other(end))
    }

    // ---- composition ----

    /// `then` applied after `first`: the outputs of `first` are glued to the
    /// inputs of `then`.
    pub fn compose_seq(&self, then: &Diagram) -> Result<Diagram> {
        if self.outputs != then.inputs {
            return Err(Error::Boundary(format!(
                "cannot glue outputs {:?} onto inputs {:?}",
                self.outputs, then.inputs
            )));
        }
        let offset = self.next_id;
        let shift = |e: End| match e {
            End::Node { node, port } => End::node(node + offset, port),
            other => other,
        };

        let mut out = Diagram::empty();
        out.nodes = self.nodes.clone();
        for (id, n) in &then.nodes {
            out.nodes.insert(id + offset, n.clone());
        }
        out.next_id = self.next_id + then.next_id;
        out.inputs = self.inputs.clone();
        out.outputs = then.outputs.clone();
        out.scalar = self.scalar * then.scalar;

        // Segment ends are tagged (side, end); glue points are first's
        // Output(i) and then's Input(i).
        #[derive(Clone, Copy, PartialEq)]
        enum Tag {
            First(End),
            Then(End),
        }
        let mut segs: Vec<(Tag, Tag, usize)> = Vec::new();
        for e in &self.edges {
            segs.push((Tag::First(e.a), Tag::First(e.b), e.dim));
        }
        for e in &then.edges {
            segs.push((Tag::Then(shift(e.a)), Tag::Then(shift(e.b)), e.dim));
        }
        let glue_partner = |t: Tag| -> Option<Tag> {
            match t {
                Tag::First(End::Output(i)) => Some(Tag::Then(End::Input(i))),
                Tag::Then(End::Input(i)) => Some(Tag::First(End::Output(i))),
                _ => None,
            }
        };
        let seg_at = |t: Tag, skip: usize| -> usize {
            // each glue point belongs to exactly one segment
            segs.iter()
                .enumerate()
                .position(|(k, s)| k != skip && (s.0 == t || s.1 == t))
                .expect("glue point has a wire on both sides")
        };
        let real = |t: Tag| -> End {
            match t {
                Tag::First(e) | Tag::Then(e) => e,
            }
        };

        let mut visited = vec![false; segs.len()];
        for start in 0..segs.len() {
            if visited[start] {
                continue;
            }
            let (a, b, dim) = segs[start];
            // Start from an end that is not a glue point.
            let (from, mut cur_far) = if glue_partner(a).is_none() {
                (a, b)
            } else if glue_partner(b).is_none() {
                (b, a)
            } else {
                continue;
            };
            visited[start] = true;
            while let Some(p) = glue_partner(cur_far) {
                let cur = seg_at(p, usize::MAX);
                visited[cur] = true;
                let s = segs[cur];
                cur_far = if s.0 == p { s.1 } else { s.0 };
            }
            out.edges.push(Edge::new(real(from), real(cur_far), dim));
        }
        // Whatever is left consists purely of glue points: closed loops.
        let mut parent: Vec<usize> = (0..segs.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for i in 0..self.outputs.len() {
            let s1 = seg_at(Tag::First(End::Output(i)), usize::MAX);
            let s2 = seg_at(Tag::Then(End::Input(i)), usize::MAX);
            if !visited[s1] && !visited[s2] {
                let (r1, r2) = (find(&mut parent, s1), find(&mut parent, s2));
                parent[r1] = r2;
            }
        }
        for k in 0..segs.len() {
            if !visited[k] && find(&mut parent, k) == k {
                out.scalar *= segs[k].2 as f64;
            }
        }
        Ok(out)
    }

    /// Disjoint union with boundaries concatenated left then right.
    pub fn compose_par(&self, right: &Diagram) -> Diagram {
        let offset = self.next_id;
        let (ni, no) = (self.inputs.len(), self.outputs.len());
        let shift = |e: End| match e {
            End::Node { node, port } => End::node(node + offset, port),
            End::Input(i) => End::Input(i + ni),
            End::Output(o) => End::Output(o + no),
        };
        let mut out = self.clone();
        for (id, n) in &right.nodes {
            out.nodes.insert(id + offset, n.clone());
        }
        out.next_id = self.next_id + right.next_id;
        out.inputs.extend_from_slice(&right.inputs);
        out.outputs.extend_from_slice(&right.outputs);
        out.scalar *= right.scalar;
        for e in &right.edges {
            out.edges.push(Edge::new(shift(e.a), shift(e.b), e.dim));
        }
        out
    }

    /// Tensor product of a list of diagrams.
    pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a Diagram>) -> Diagram {
        parts
            .into_iter()
            .fold(Diagram::empty(), |acc, d| acc.compose_par(d))
    }

    /// Bends every boundary wire around: inputs become outputs in reversed
    /// order and vice versa. Node tensors are untouched.
    pub fn transpose(&self) -> Diagram {
        let (ni, no) = (self.inputs.len(), self.outputs.len());
        let flip = |e: End| match e {
            End::Input(i) => End::Output(ni - 1 - i),
            End::Output(o) => End::Input(no - 1 - o),
            other => other,
        };
        let mut out = self.clone();
        out.edges = self
            .edges
            .iter()
            .map(|e| Edge::new(flip(e.a), flip(e.b), e.dim))
            .collect();
        out.inputs = self.outputs.iter().rev().copied().collect();
        out.outputs = self.inputs.iter().rev().copied().collect();
        out
    }

    /// Transpose plus entrywise conjugation. Every generator except H is
    /// conjugation-invariant up to its label; H and its adjoint swap.
    pub fn adjoint(&self) -> Diagram {
        let mut out = self.transpose();
        for node in out.nodes.values_mut() {
            node.kind = match &node.kind {
                GeneratorKind::ZSpider { phase } => GeneratorKind::ZSpider {
                    phase: phase.conj(),
                },
                GeneratorKind::H => GeneratorKind::HDagger,
                GeneratorKind::HDagger => GeneratorKind::H,
                other => other.clone(),
            };
        }
        out.scalar = out.scalar.conj();
        out
    }

    /// Reports every broken invariant. Never panics.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut push = |subject: String, invariant: String| v.push(Violation { subject, invariant });

        for (id, n) in &self.nodes {
            if let Err(e) = n.kind.check(n.dim, n.n_in, n.n_out) {
                push(format!("node {id}"), e.to_string());
            }
        }
        if !(self.scalar.re.is_finite() && self.scalar.im.is_finite()) {
            push("scalar".into(), "scalar must be finite".into());
        }

        let mut port_uses: BTreeMap<(NodeId, Port), usize> = BTreeMap::new();
        let mut in_uses = vec![0usize; self.inputs.len()];
        let mut out_uses = vec![0usize; self.outputs.len()];

        for (k, e) in self.edges.iter().enumerate() {
            if e.dim == 0 {
                push(format!("edge {k}"), "wire dimension must be >= 1".into());
            }
            for end in [e.a, e.b] {
                match end {
                    End::Node { node, port } => match self.nodes.get(&node) {
                        None => push(format!("edge {k}"), format!("unknown node {node}")),
                        Some(n) => match n.port_dim(port) {
                            None => push(
                                format!("edge {k}"),
                                format!("node {node} has no port {port:?}"),
                            ),
                            Some(pd) => {
                                *port_uses.entry((node, port)).or_default() += 1;
                                if pd != e.dim {
                                    push(
                                        format!("edge {k}"),
                                        format!(
                                            "dimension mismatch: wire {} at node {node} port {port:?} of dimension {pd}",
                                            e.dim
                                        ),
                                    );
                                }
                            }
                        },
                    },
                    End::Input(i) => match self.inputs.get(i) {
                        None => push(format!("edge {k}"), format!("unknown input slot {i}")),
                        Some(&dim) => {
                            in_uses[i] += 1;
                            if dim != e.dim {
                                push(
                                    format!("edge {k}"),
                                    format!("dimension mismatch at input slot {i}: {} vs {dim}", e.dim),
                                );
                            }
                        }
                    },
                    End::Output(o) => match self.outputs.get(o) {
                        None => push(format!("edge {k}"), format!("unknown output slot {o}")),
                        Some(&dim) => {
                            out_uses[o] += 1;
                            if dim != e.dim {
                                push(
                                    format!("edge {k}"),
                                    format!("dimension mismatch at output slot {o}: {} vs {dim}", e.dim),
                                );
                            }
                        }
                    },
                }
            }
        }

        for (id, n) in &self.nodes {
            for port in n.ports() {
                let uses = port_uses.get(&(*id, port)).copied().unwrap_or(0);
                if uses != 1 {
                    push(
                        format!("node {id}"),
                        format!("arity: port {port:?} used by {uses} wire ends"),
                    );
                }
            }
        }
        for (i, &u) in in_uses.iter().enumerate() {
            if u != 1 {
                push(format!("input slot {i}"), format!("used by {u} wire ends"));
            }
        }
        for (o, &u) in out_uses.iter().enumerate() {
            if u != 1 {
                push(format!("output slot {o}"), format!("used by {u} wire ends"));
            }
        }
        v
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    /// Renumbers nodes to `0..n` in ascending id order.
    pub fn compact_ids(&self) -> Diagram {
        let map: BTreeMap<NodeId, NodeId> = self
            .nodes
            .keys()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let re = |e: End| match e {
            End::Node { node, port } => End::node(map[&node], port),
            other => other,
        };
        let mut out = self.clone();
        out.nodes = self
            .nodes
            .iter()
            .map(|(id, n)| (map[id], n.clone()))
            .collect();
        out.edges = self
            .edges
            .iter()
            .map(|e| Edge::new(re(e.a), re(e.b), e.dim))
            .collect();
        out.next_id = out.nodes.len();
        out
    }
}
