//! Structural simplification with a small sound rule set.
//!
//! Every step strictly lowers `(node count, edge count)`, so `simplify`
//! stops after at most `nodes + edges` steps. Steps are recorded with the
//! exact edges and nodes they remove and add, and replaying a trace
//! reproduces the simplified diagram exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Edge, End, Node, NodeId, Port};
use crate::error::{Error, Result};
use crate::eval::Evaluator;
use crate::generator::GeneratorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoreRule {
    #[serde(rename = "identity-spider-elim")]
    IdentitySpiderElim,
    #[serde(rename = "hh-dagger-elim")]
    HhDaggerElim,
    #[serde(rename = "z-fusion")]
    ZFusion,
    #[serde(rename = "x-fusion")]
    XFusion,
    #[serde(rename = "hopf-disconnect")]
    HopfDisconnect,
    #[serde(rename = "colour-change-push")]
    ColourChangePush,
    #[serde(rename = "scalar-fold")]
    ScalarFold,
}

impl CoreRule {
    /// Priority order used by [`simplify`].
    pub const ALL: [CoreRule; 7] = [
        CoreRule::IdentitySpiderElim,
        CoreRule::HhDaggerElim,
        CoreRule::ZFusion,
        CoreRule::XFusion,
        CoreRule::HopfDisconnect,
        CoreRule::ColourChangePush,
        CoreRule::ScalarFold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoreRule::IdentitySpiderElim => "identity-spider-elim",
            CoreRule::HhDaggerElim => "hh-dagger-elim",
            CoreRule::ZFusion => "z-fusion",
            CoreRule::XFusion => "x-fusion",
            CoreRule::HopfDisconnect => "hopf-disconnect",
            CoreRule::ColourChangePush => "colour-change-push",
            CoreRule::ScalarFold => "scalar-fold",
        }
    }

    pub fn from_name(name: &str) -> Result<CoreRule> {
        CoreRule::ALL
            .into_iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }
}

/// A place where a core rule applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub rule: CoreRule,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: CoreRule,
    pub matched: Vec<NodeId>,
    pub removed_nodes: Vec<NodeId>,
    pub removed_edges: Vec<Edge>,
    pub added_nodes: Vec<(NodeId, Node)>,
    pub added_edges: Vec<Edge>,
    pub scalar: C64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<RewriteStep>,
    /// True when `max_steps` ran out before a fixpoint.
    pub exhausted: bool,
}

impl Trace {
    /// The steps as a JSON array.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.steps).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Vec<RewriteStep>> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn is_plain_z(n: &Node) -> bool {
    matches!(&n.kind, GeneratorKind::ZSpider { phase } if phase.is_ones(0.0))
}

fn is_z(n: &Node) -> bool {
    matches!(n.kind, GeneratorKind::ZSpider { .. })
}

fn x_label(n: &Node) -> Option<usize> {
    match n.kind {
        GeneratorKind::XSpider { label } => Some(label),
        _ => None,
    }
}

/// `+1` for inputs, `-1` for outputs: the sign of a leg in the X spider
/// congruence `sum(in) - sum(out) = j`.
fn sign(p: Port) -> i64 {
    match p {
        Port::In(_) => 1,
        Port::Out(_) => -1,
    }
}

fn port_on(e: End, node: NodeId) -> Option<Port> {
    match e {
        End::Node { node: n, port } if n == node => Some(port),
        _ => None,
    }
}

/// Edges between `a` and `b` (a != b), as (edge index, port on a, port on b).
fn between(d: &Diagram, a: NodeId, b: NodeId) -> Vec<(usize, Port, Port)> {
    d.edges()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            if let (Some(pa), Some(pb)) = (port_on(e.a, a), port_on(e.b, b)) {
                Some((i, pa, pb))
            } else if let (Some(pb), Some(pa)) = (port_on(e.a, b), port_on(e.b, a)) {
                Some((i, pa, pb))
            } else {
                None
            }
        })
        .collect()
}

fn self_loops(d: &Diagram, a: NodeId) -> Vec<usize> {
    d.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.a.node_id() == Some(a) && e.b.node_id() == Some(a))
        .map(|(i, _)| i)
        .collect()
}

/// Far end of the edge at `end`.
fn far(d: &Diagram, end: End) -> Option<(usize, End)> {
    d.edges()
        .iter()
        .enumerate()
        .find_map(|(i, e)| e.other(end).map(|o| (i, o)))
}

/// Keeps the listed ports, inputs first; returns the new port numbering.
fn relabel(kept: &[Port]) -> (usize, usize, BTreeMap<Port, Port>) {
    let mut map = BTreeMap::new();
    let (mut ni, mut no) = (0, 0);
    for &p in kept {
        match p {
            Port::In(_) => {
                map.insert(p, Port::In(ni));
                ni += 1;
            }
            Port::Out(_) => {
                map.insert(p, Port::Out(no));
                no += 1;
            }
        }
    }
    (ni, no, map)
}

/// Pending rewrite, turned into a [`RewriteStep`] by [`Plan::finish`].
struct Plan {
    rule: CoreRule,
    matched: Vec<NodeId>,
    removed_nodes: Vec<NodeId>,
    added_nodes: Vec<(NodeId, Node)>,
    map: BTreeMap<End, End>,
    drop_edges: BTreeSet<usize>,
    extra_edges: Vec<Edge>,
    scalar: C64,
}

impl Plan {
    fn new(rule: CoreRule, matched: Vec<NodeId>) -> Self {
        Plan {
            rule,
            removed_nodes: matched.clone(),
            matched,
            added_nodes: Vec::new(),
            map: BTreeMap::new(),
            drop_edges: BTreeSet::new(),
            extra_edges: Vec::new(),
            scalar: one(),
        }
    }

    fn finish(self, d: &Diagram) -> Result<RewriteStep> {
        let gone: BTreeSet<NodeId> = self.removed_nodes.iter().copied().collect();
        let on_gone = |e: End| e.node_id().is_some_and(|n| gone.contains(&n));
        let mut removed_edges = Vec::new();
        let mut added_edges = Vec::new();
        for (i, e) in d.edges().iter().enumerate() {
            let touched = on_gone(e.a) || on_gone(e.b);
            if !touched && !self.drop_edges.contains(&i) {
                continue;
            }
            removed_edges.push(e.clone());
            if self.drop_edges.contains(&i) {
                continue;
            }
            let re = |x: End| -> Result<End> {
                if on_gone(x) {
                    self.map
                        .get(&x)
                        .copied()
                        .ok_or_else(|| Error::StaleSite(format!("{}: unmapped end {x:?}", self.rule.name())))
                } else {
                    Ok(x)
                }
            };
            added_edges.push(Edge::new(re(e.a)?, re(e.b)?, e.dim));
        }
        added_edges.extend(self.extra_edges);
        Ok(RewriteStep {
            rule: self.rule,
            matched: self.matched,
            removed_nodes: self.removed_nodes,
            removed_edges,
            added_nodes: self.added_nodes,
            added_edges,
            scalar: self.scalar,
        })
    }
}

/// Applies a recorded step. This is the only code path that mutates
/// diagrams during simplification, so replay is exact by construction.
pub fn replay_step(d: &Diagram, s: &RewriteStep) -> Result<Diagram> {
    let mut out = d.clone();
    for e in &s.removed_edges {
        let k = out
            .edges
            .iter()
            .position(|x| x == e)
            .ok_or_else(|| Error::StaleSite(format!("edge {e:?} not present")))?;
        out.edges.remove(k);
    }
    for id in &s.removed_nodes {
        out.nodes
            .remove(id)
            .ok_or_else(|| Error::StaleSite(format!("node {id} not present")))?;
    }
    for (id, n) in &s.added_nodes {
        if out.nodes.contains_key(id) {
            return Err(Error::StaleSite(format!("node {id} already present")));
        }
        out.insert_node_unchecked(*id, n.clone());
    }
    out.edges.extend(s.added_edges.iter().cloned());
    out.scalar *= s.scalar;
    Ok(out)
}

/// Replays a whole trace.
pub fn replay(initial: &Diagram, steps: &[RewriteStep]) -> Result<Diagram> {
    steps.iter().try_fold(initial.clone(), |d, s| replay_step(&d, s))
}

// ---- matching ----

fn z_fusion_site(d: &Diagram, a: NodeId) -> Option<Vec<NodeId>> {
    let na = d.node(a)?;
    if !is_z(na) {
        return None;
    }
    if !self_loops(d, a).is_empty() {
        return Some(vec![a]);
    }
    d.neighbours(a)
        .into_iter()
        .find(|&b| d.node(b).is_some_and(|nb| is_z(nb) && nb.dim == na.dim))
        .map(|b| vec![a, b])
}

/// The fusion edge and whether `b` must be flipped, if the pair fuses.
fn x_fusion_shape(d: &Diagram, a: NodeId, b: NodeId) -> Option<(Vec<(usize, Port, Port)>, bool)> {
    let (na, nb) = (d.node(a)?, d.node(b)?);
    x_label(na)?;
    x_label(nb)?;
    if na.dim != nb.dim {
        return None;
    }
    let es = between(d, a, b);
    let (_, pa, pb) = *es.first()?;
    let flip = sign(pa) == sign(pb);
    let sb = |p: Port| if flip { -sign(p) } else { sign(p) };
    let ok = na.dim == 2 || es.iter().all(|&(_, pa, pb)| sign(pa) == -sb(pb));
    ok.then_some((es, flip))
}

fn x_fusion_site(d: &Diagram, a: NodeId) -> Option<Vec<NodeId>> {
    x_label(d.node(a)?)?;
    d.neighbours(a)
        .into_iter()
        .find(|&b| x_fusion_shape(d, a, b).is_some())
        .map(|b| vec![a, b])
}

/// Two edges from a Z spider into an X spider whose legs cancel.
fn hopf_pair(d: &Diagram, z: NodeId, x: NodeId) -> Option<(usize, usize)> {
    let (nz, nx) = (d.node(z)?, d.node(x)?);
    if !is_z(nz) || x_label(nx).is_none() {
        return None;
    }
    let es = between(d, z, x);
    for (i, &(e1, _, p1)) in es.iter().enumerate() {
        for &(e2, _, p2) in &es[i + 1..] {
            if nx.dim == 2 || sign(p1) != sign(p2) {
                return Some((e1, e2));
            }
        }
    }
    None
}

fn hopf_site(d: &Diagram, a: NodeId) -> Option<Vec<NodeId>> {
    let na = d.node(a)?;
    let nbrs = d.neighbours(a);
    if is_z(na) {
        nbrs.into_iter().find(|&x| hopf_pair(d, a, x).is_some()).map(|x| vec![a, x])
    } else if x_label(na).is_some() {
        nbrs.into_iter().find(|&z| hopf_pair(d, z, a).is_some()).map(|z| vec![z, a])
    } else {
        None
    }
}

fn identity_like(n: &Node) -> bool {
    match n.kind {
        GeneratorKind::ZSpider { .. } => n.arity() == 2 && is_plain_z(n),
        GeneratorKind::XSpider { label } => label == 0 && n.n_in == 1 && n.n_out == 1,
        GeneratorKind::WSpider => n.n_in == 1 && n.n_out == 1,
        _ => false,
    }
}

fn hh_site(d: &Diagram, a: NodeId) -> Option<Vec<NodeId>> {
    let na = d.node(a)?;
    let want = match na.kind {
        GeneratorKind::H => GeneratorKind::HDagger,
        GeneratorKind::HDagger => GeneratorKind::H,
        _ => return None,
    };
    if !self_loops(d, a).is_empty() {
        return None;
    }
    d.neighbours(a)
        .into_iter()
        .find(|&b| d.node(b).is_some_and(|nb| nb.kind == want && self_loops(d, b).is_empty()))
        .map(|b| vec![a, b])
}

/// For a `K_j` Z spider whose every leg meets its own H or H-dagger,
/// returns `(j, [(z port, hadamard node, is_h)])`.
fn colour_change_shape(d: &Diagram, z: NodeId) -> Option<(usize, Vec<(Port, NodeId, bool)>)> {
    let nz = d.node(z)?;
    let GeneratorKind::ZSpider { phase } = &nz.kind else {
        return None;
    };
    let j = phase.as_k(1e-12)?;
    if nz.arity() == 0 {
        return None;
    }
    let mut legs = Vec::new();
    let mut seen = BTreeSet::new();
    for p in nz.ports() {
        let (_, other) = far(d, End::node(z, p))?;
        let h = other.node_id()?;
        let nh = d.node(h)?;
        let is_h = match nh.kind {
            GeneratorKind::H => true,
            GeneratorKind::HDagger => false,
            _ => return None,
        };
        if h == z || !seen.insert(h) {
            return None;
        }
        legs.push((p, h, is_h));
    }
    // The far side of each Hadamard must lie outside the matched set.
    for &(_, h, _) in &legs {
        for e in d.edges_of(h) {
            let edge = &d.edges()[e];
            for end in [edge.a, edge.b] {
                if let Some(n) = end.node_id() {
                    if n != h && n != z && seen.contains(&n) {
                        return None;
                    }
                }
            }
            if edge.a.node_id() == edge.b.node_id() {
                return None;
            }
        }
    }
    Some((j, legs))
}

/// Connected components of nodes with no boundary wire, each sorted.
fn closed_components(d: &Diagram) -> Vec<Vec<NodeId>> {
    let ids: Vec<NodeId> = d.nodes().keys().copied().collect();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut open = vec![false; ids.len()];
    let mut boundary_hits = Vec::new();
    for e in d.edges() {
        match (e.a.node_id(), e.b.node_id()) {
            (Some(a), Some(b)) => {
                let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
                parent[ra] = rb;
            }
            (Some(a), None) | (None, Some(a)) => boundary_hits.push(index[&a]),
            (None, None) => {}
        }
    }
    for i in boundary_hits {
        let r = find(&mut parent, i);
        open[r] = true;
    }
    let mut comps: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for i in 0..ids.len() {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(ids[i]);
    }
    let mut out: Vec<Vec<NodeId>> = comps
        .into_iter()
        .filter(|(r, _)| !open[*r])
        .map(|(_, v)| v)
        .collect();
    out.sort();
    out
}

/// Sub-diagram induced by a closed set of nodes.
fn component(d: &Diagram, nodes: &[NodeId]) -> Diagram {
    let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let mut c = Diagram::empty();
    for &n in nodes {
        c.insert_node_unchecked(n, d.node(n).expect("node").clone());
    }
    for e in d.edges() {
        if e.a.node_id().is_some_and(|n| set.contains(&n)) {
            c.add_edge(e.a, e.b, e.dim);
        }
    }
    c
}

/// All non-overlapping sites of `rule`, lowest node id first.
pub fn find_matches(d: &Diagram, rule: CoreRule) -> Vec<Site> {
    let mut raw: Vec<Vec<NodeId>> = Vec::new();
    match rule {
        CoreRule::ScalarFold => raw = closed_components(d),
        _ => {
            for &a in d.nodes().keys() {
                let hit = match rule {
                    CoreRule::IdentitySpiderElim => d.node(a).filter(|n| identity_like(n)).map(|_| vec![a]),
                    CoreRule::HhDaggerElim => hh_site(d, a),
                    CoreRule::ZFusion => z_fusion_site(d, a),
                    CoreRule::XFusion => x_fusion_site(d, a),
                    CoreRule::HopfDisconnect => hopf_site(d, a),
                    CoreRule::ColourChangePush => colour_change_shape(d, a).map(|(_, legs)| {
                        let mut v = vec![a];
                        v.extend(legs.iter().map(|l| l.1));
                        v
                    }),
                    CoreRule::ScalarFold => unreachable!(),
                };
                raw.extend(hit);
            }
        }
    }
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for nodes in raw {
        if nodes.iter().any(|n| used.contains(n)) {
            continue;
        }
        used.extend(nodes.iter().copied());
        out.push(Site { rule, nodes });
    }
    out
}

// ---- rewriting ----

fn stale(site: &Site) -> Error {
    Error::StaleSite(format!("{} at {:?}", site.rule.name(), site.nodes))
}

/// Replaces a two-ended piece of wire made of `nodes` by a plain wire.
fn splice(d: &Diagram, rule: CoreRule, nodes: Vec<NodeId>, loop_factor: C64, scalar: C64) -> Result<RewriteStep> {
    let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let inside = |e: End| e.node_id().is_some_and(|n| set.contains(&n));
    let mut ends = Vec::new();
    let mut dim = 0;
    let mut plan = Plan::new(rule, nodes);
    for (i, e) in d.edges().iter().enumerate() {
        let (ia, ib) = (inside(e.a), inside(e.b));
        if ia || ib {
            plan.drop_edges.insert(i);
            dim = e.dim;
            if !ia {
                ends.push(e.a);
            }
            if !ib {
                ends.push(e.b);
            }
        }
    }
    match ends.as_slice() {
        [a, b] => plan.extra_edges.push(Edge::new(*a, *b, dim)),
        [] => plan.scalar *= loop_factor,
        _ => return Err(Error::StaleSite("splice needs two open ends".into())),
    }
    plan.scalar *= scalar;
    plan.finish(d)
}

fn rewrite_z_fusion(d: &Diagram, site: &Site) -> Result<RewriteStep> {
    let loops_only = site.nodes.len() == 1;
    let a = site.nodes[0];
    let b = *site.nodes.last().unwrap();
    let na = d.node(a).ok_or_else(|| stale(site))?;
    let nb = d.node(b).ok_or_else(|| stale(site))?;
    let (GeneratorKind::ZSpider { phase: pa }, GeneratorKind::ZSpider { phase: pb }) = (&na.kind, &nb.kind) else {
        return Err(stale(site));
    };
    let pair: BTreeSet<NodeId> = [a, b].into();
    let internal: BTreeSet<usize> = d
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            e.a.node_id().is_some_and(|n| pair.contains(&n)) && e.b.node_id().is_some_and(|n| pair.contains(&n))
        })
        .map(|(i, _)| i)
        .collect();
    if internal.is_empty() {
        return Err(stale(site));
    }
    let busy: BTreeSet<End> = internal
        .iter()
        .flat_map(|&i| [d.edges()[i].a, d.edges()[i].b])
        .collect();
    let mut owners: Vec<(NodeId, Port)> = Vec::new();
    let members: Vec<(NodeId, &Node)> = if loops_only { vec![(a, na)] } else { vec![(a, na), (b, nb)] };
    for kind_in in [true, false] {
        for (id, n) in &members {
            for p in n.ports() {
                if matches!(p, Port::In(_)) == kind_in && !busy.contains(&End::node(*id, p)) {
                    owners.push((*id, p));
                }
            }
        }
    }
    let mut plan = Plan::new(CoreRule::ZFusion, site.nodes.clone());
    let (mut ni, mut no) = (0, 0);
    for (id, p) in &owners {
        let np = match p {
            Port::In(_) => {
                ni += 1;
                Port::In(ni - 1)
            }
            Port::Out(_) => {
                no += 1;
                Port::Out(no - 1)
            }
        };
        plan.map.insert(End::node(*id, *p), End::node(a, np));
    }
    let phase = if loops_only { pa.clone() } else { pa.mul(pb) };
    plan.added_nodes.push((
        a,
        Node {
            kind: GeneratorKind::z(phase),
            dim: na.dim,
            n_in: ni,
            n_out: no,
        },
    ));
    plan.drop_edges = internal;
    plan.finish(d)
}

fn rewrite_x_fusion(d: &Diagram, site: &Site) -> Result<RewriteStep> {
    let (a, b) = match site.nodes.as_slice() {
        [a, b] => (*a, *b),
        _ => return Err(stale(site)),
    };
    let (es, flip) = x_fusion_shape(d, a, b).ok_or_else(|| stale(site))?;
    let (na, nb) = (d.node(a).unwrap(), d.node(b).unwrap());
    let dim = na.dim;
    let (ja, jb) = (x_label(na).unwrap(), x_label(nb).unwrap());
    let jb = if flip { (dim - jb) % dim } else { jb };
    let busy: BTreeSet<End> = es
        .iter()
        .flat_map(|&(_, pa, pb)| [End::node(a, pa), End::node(b, pb)])
        .collect();
    // After a flip, b's inputs act as outputs and vice versa.
    let role = |id: NodeId, p: Port| -> bool {
        let is_in = matches!(p, Port::In(_));
        if id == b && flip {
            !is_in
        } else {
            is_in
        }
    };
    let mut plan = Plan::new(CoreRule::XFusion, site.nodes.clone());
    let (mut ni, mut no) = (0, 0);
    for want_in in [true, false] {
        for (id, n) in [(a, na), (b, nb)] {
            for p in n.ports() {
                if role(id, p) != want_in || busy.contains(&End::node(id, p)) {
                    continue;
                }
                let np = if want_in {
                    ni += 1;
                    Port::In(ni - 1)
                } else {
                    no += 1;
                    Port::Out(no - 1)
                };
                plan.map.insert(End::node(id, p), End::node(a, np));
            }
        }
    }
    plan.added_nodes.push((
        a,
        Node {
            kind: GeneratorKind::x((ja + jb) % dim),
            dim,
            n_in: ni,
            n_out: no,
        },
    ));
    plan.drop_edges = es.iter().map(|e| e.0).collect();
    plan.scalar = C64::new((dim as f64).powi(es.len() as i32 - 1), 0.0);
    plan.finish(d)
}

fn rewrite_hopf(d: &Diagram, site: &Site) -> Result<RewriteStep> {
    let (z, x) = match site.nodes.as_slice() {
        [z, x] => (*z, *x),
        _ => return Err(stale(site)),
    };
    let (e1, e2) = hopf_pair(d, z, x).ok_or_else(|| stale(site))?;
    let busy: BTreeSet<End> = [e1, e2].iter().flat_map(|&i| [d.edges()[i].a, d.edges()[i].b]).collect();
    let mut plan = Plan::new(CoreRule::HopfDisconnect, site.nodes.clone());
    for id in [z, x] {
        let n = d.node(id).unwrap();
        let kept: Vec<Port> = n.ports().filter(|p| !busy.contains(&End::node(id, *p))).collect();
        let (ni, no, map) = relabel(&kept);
        for (old, new) in map {
            plan.map.insert(End::node(id, old), End::node(id, new));
        }
        plan.added_nodes.push((
            id,
            Node {
                kind: n.kind.clone(),
                dim: n.dim,
                n_in: ni,
                n_out: no,
            },
        ));
    }
    plan.drop_edges = [e1, e2].into();
    plan.finish(d)
}

fn rewrite_colour_change(d: &Diagram, site: &Site) -> Result<RewriteStep> {
    let z = site.nodes[0];
    let (j, legs) = colour_change_shape(d, z).ok_or_else(|| stale(site))?;
    let mut nodes = vec![z];
    nodes.extend(legs.iter().map(|l| l.1));
    if nodes != site.nodes {
        return Err(stale(site));
    }
    let dim = d.node(z).unwrap().dim;
    let mut plan = Plan::new(CoreRule::ColourChangePush, nodes);
    let (mut ni, mut no) = (0, 0);
    for &(zp, h, is_h) in &legs {
        let (zi, _) = far(d, End::node(z, zp)).unwrap();
        plan.drop_edges.insert(zi);
        let Some(End::Node { port: hp, .. }) = d.edges()[zi].other(End::node(z, zp)) else {
            return Err(stale(site));
        };
        let other = match hp {
            Port::In(_) => Port::Out(0),
            Port::Out(_) => Port::In(0),
        };
        let np = if is_h {
            no += 1;
            Port::Out(no - 1)
        } else {
            ni += 1;
            Port::In(ni - 1)
        };
        plan.map.insert(End::node(h, other), End::node(z, np));
    }
    plan.added_nodes.push((
        z,
        Node {
            kind: GeneratorKind::x(j),
            dim,
            n_in: ni,
            n_out: no,
        },
    ));
    plan.scalar = C64::new(dim as f64, 0.0);
    plan.finish(d)
}

fn rewrite_scalar_fold(d: &Diagram, site: &Site, ev: &Evaluator) -> Result<RewriteStep> {
    if !closed_components(d).contains(&site.nodes) {
        return Err(stale(site));
    }
    let value = ev.interpret(&component(d, &site.nodes))?.data[0];
    let mut plan = Plan::new(CoreRule::ScalarFold, site.nodes.clone());
    plan.drop_edges = site.nodes.iter().flat_map(|&n| d.edges_of(n)).collect();
    plan.scalar = value;
    plan.finish(d)
}

fn build_step(d: &Diagram, site: &Site, ev: &Evaluator) -> Result<RewriteStep> {
    for n in &site.nodes {
        if d.node(*n).is_none() {
            return Err(stale(site));
        }
    }
    match site.rule {
        CoreRule::IdentitySpiderElim => {
            let n = d.node(site.nodes[0]).unwrap();
            if site.nodes.len() != 1 || !identity_like(n) {
                return Err(stale(site));
            }
            splice(d, site.rule, site.nodes.clone(), C64::new(n.dim as f64, 0.0), one())
        }
        CoreRule::HhDaggerElim => {
            let [a, b] = site.nodes[..] else {
                return Err(stale(site));
            };
            if hh_site(d, a).as_deref() != Some(&[a, b][..]) {
                return Err(stale(site));
            }
            let dim = C64::new(d.node(a).unwrap().dim as f64, 0.0);
            splice(d, site.rule, site.nodes.clone(), dim, dim)
        }
        CoreRule::ZFusion => rewrite_z_fusion(d, site),
        CoreRule::XFusion => rewrite_x_fusion(d, site),
        CoreRule::HopfDisconnect => rewrite_hopf(d, site),
        CoreRule::ColourChangePush => rewrite_colour_change(d, site),
        CoreRule::ScalarFold => rewrite_scalar_fold(d, site, ev),
    }
}

/// Rewrites one site.
pub fn apply_step(d: &Diagram, site: &Site) -> Result<(Diagram, RewriteStep)> {
    apply_step_with(d, site, &Evaluator::default())
}

pub fn apply_step_with(d: &Diagram, site: &Site, ev: &Evaluator) -> Result<(Diagram, RewriteStep)> {
    let step = build_step(d, site, ev)?;
    Ok((replay_step(d, &step)?, step))
}

/// Applies core rules to a fixpoint or until `max_steps`, always taking
/// the first site of the first rule in [`CoreRule::ALL`] order. Closed
/// components too large to evaluate are left in place.
pub fn simplify(d: &Diagram, max_steps: usize) -> Result<(Diagram, Trace)> {
    simplify_with(d, max_steps, &Evaluator::default())
}

pub fn simplify_with(d: &Diagram, max_steps: usize, ev: &Evaluator) -> Result<(Diagram, Trace)> {
    d.ensure_valid()?;
    let mut cur = d.clone();
    let mut trace = Trace::default();
    'outer: loop {
        for rule in CoreRule::ALL {
            for site in find_matches(&cur, rule) {
                let step = match build_step(&cur, &site, ev) {
                    Ok(s) => s,
                    Err(Error::CapExceeded { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if trace.steps.len() == max_steps {
                    trace.exhausted = true;
                    break 'outer;
                }
                cur = replay_step(&cur, &step)?;
                trace.steps.push(step);
                continue 'outer;
            }
        }
        break;
    }
    Ok((cur, trace))
}

/// Folds every closed component into one complex factor `c`, so that
/// `[[d]] = c [[rest]]`. The scalar field of `d` stays on `rest`.
pub fn extract_scalar(d: &Diagram) -> Result<(Diagram, C64)> {
    extract_scalar_with(d, &Evaluator::default())
}

pub fn extract_scalar_with(d: &Diagram, ev: &Evaluator) -> Result<(Diagram, C64)> {
    let mut cur = d.clone();
    let mut factor = one();
    for nodes in closed_components(d) {
        let site = Site {
            rule: CoreRule::ScalarFold,
            nodes,
        };
        let step = rewrite_scalar_fold(&cur, &site, ev)?;
        factor *= step.scalar;
        let mut s = step;
        s.scalar = one();
        cur = replay_step(&cur, &s)?;
    }
    Ok((cur, factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::interpret;
    use crate::io::diagram_to_json;
    use crate::phase::PhaseVector;
    use crate::random::{random_diagram, RandomShape};
    use crate::rules::kit::seq;
    use crate::tensor::approx_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn same(a: &Diagram, b: &Diagram, tol: f64) -> bool {
        approx_eq(&interpret(a).unwrap(), &interpret(b).unwrap(), tol)
    }

    #[test]
    fn z_chain_fuses_in_four_steps() {
        let parts: Vec<Diagram> = (0..5)
            .map(|k| Diagram::z(PhaseVector::from_angles(&[0.3 * k as f64, 0.1]), 1, 1).unwrap())
            .collect();
        let d = seq(&parts).unwrap();
        let (s, t) = simplify(&d, 100).unwrap();
        assert_eq!(s.node_count(), 1);
        assert_eq!(t.steps.len(), 4);
        assert!(t.steps.iter().all(|s| s.rule == CoreRule::ZFusion));
        assert!(same(&d, &s, 1e-12));
    }

    #[test]
    fn two_hadamard_pairs_leave_d_squared() {
        let d = 3;
        let (h, hd) = (Diagram::h(d).unwrap(), Diagram::h_dagger(d).unwrap());
        let dg = seq(&[hd.clone(), h.clone(), hd, h]).unwrap();
        let (s, t) = simplify(&dg, 100).unwrap();
        assert_eq!(s.node_count(), 0);
        assert_eq!(t.steps.len(), 2);
        assert!((s.scalar() - 9.0).norm() < 1e-12);
        assert_eq!(s.edge_count(), 1);
        assert!(same(&dg, &s, 1e-12));
    }

    #[test]
    fn minimal_generator_takes_no_steps() {
        let dg = Diagram::triangle(4).unwrap();
        let (s, t) = simplify(&dg, 100).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(s, dg);
        assert!(find_matches(&dg, CoreRule::HhDaggerElim).is_empty());
    }

    #[test]
    fn match_examples() {
        let a = Diagram::z(PhaseVector::from_angles(&[1.0, 2.0]), 1, 1).unwrap();
        let two = a.compose_seq(&a).unwrap();
        assert_eq!(find_matches(&two, CoreRule::ZFusion).len(), 1);
        let plain = Diagram::z(PhaseVector::ones(3), 1, 1).unwrap();
        assert_eq!(find_matches(&plain, CoreRule::IdentitySpiderElim).len(), 1);
    }

    #[test]
    fn fusion_multiplies_phases() {
        let pa = PhaseVector::new(vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)]);
        let pb = PhaseVector::new(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let dg = Diagram::z(pa, 1, 1).unwrap().compose_seq(&Diagram::z(pb, 1, 1).unwrap()).unwrap();
        let site = find_matches(&dg, CoreRule::ZFusion).remove(0);
        let (out, step) = apply_step(&dg, &site).unwrap();
        let n = out.nodes().values().next().unwrap();
        let GeneratorKind::ZSpider { phase } = &n.kind else { panic!() };
        assert_eq!(phase.entries(), &[C64::new(2.0, 0.0), C64::new(0.0, -1.0)]);
        assert_eq!(step.scalar, C64::new(1.0, 0.0));
        assert!(apply_step(&out, &site).is_err());
    }

    #[test]
    fn x_fusion_and_hopf_scalars_match_the_interpretation() {
        for d in 2..=4 {
            // three parallel edges between two X spiders
            let lemma = crate::rules::build_lemma(
                "XMultiEdgeFusion",
                d,
                &[("j", 1), ("k", d - 1), ("r", 3)]
                    .iter()
                    .map(|(k, v)| (k.to_string(), crate::rules::Param::Int(*v)))
                    .collect(),
            )
            .unwrap();
            let (s, t) = simplify(&lemma.lhs, 10).unwrap();
            assert!(same(&lemma.lhs, &s, 1e-12));
            assert!(t.steps.iter().any(|s| s.rule == CoreRule::XFusion));
            let hopf = crate::rules::build_lemma("Hopf", d, &Default::default()).unwrap();
            let (s, t) = simplify(&hopf.lhs, 10).unwrap();
            assert!(t.steps.iter().any(|s| s.rule == CoreRule::HopfDisconnect));
            assert!(same(&hopf.lhs, &s, 1e-12));
        }
    }

    #[test]
    fn colour_change_pushes_through_hadamards() {
        let d = 3;
        let dg = seq(&[
            Diagram::h_dagger(d).unwrap(),
            Diagram::z(PhaseVector::k(d, 2), 1, 2).unwrap(),
            crate::rules::kit::par(&[Diagram::h(d).unwrap(), Diagram::h(d).unwrap()]),
        ])
        .unwrap();
        let sites = find_matches(&dg, CoreRule::ColourChangePush);
        assert_eq!(sites.len(), 1);
        let (out, _) = apply_step(&dg, &sites[0]).unwrap();
        assert_eq!(out.node_count(), 1);
        assert!(same(&dg, &out, 1e-12));
    }

    #[test]
    fn extract_scalar_examples() {
        let d = 4;
        let s = Diagram::z(PhaseVector::s(d), 0, 0).unwrap();
        let w = Diagram::identity(&[d]).compose_par(&s);
        let (rest, c) = extract_scalar(&w).unwrap();
        assert!((c - 0.25).norm() < 1e-15);
        assert_eq!((rest.node_count(), rest.edges()), (0, Diagram::identity(&[d]).edges()));
        let (same_d, one) = extract_scalar(&Diagram::identity(&[d])).unwrap();
        assert_eq!(one, C64::new(1.0, 0.0));
        assert_eq!(same_d, Diagram::identity(&[d]));
        let two = s.compose_par(&Diagram::z(PhaseVector::scalar(d, C64::new(3.0, 1.0)), 0, 0).unwrap());
        let (_, c) = extract_scalar(&two).unwrap();
        assert!((c - C64::new(0.75, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn random_diagrams_survive_simplification() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut total_steps = 0;
        let mut fired = BTreeMap::new();
        for k in 0..500 {
            let shape = RandomShape::new(2 + k % 3, 10);
            let dg = random_diagram(&mut rng, &shape);
            let (s, t) = simplify(&dg, 1000).unwrap();
            total_steps += t.steps.len();
            for st in &t.steps {
                *fired.entry(st.rule).or_insert(0) += 1;
            }
            assert!(t.steps.len() <= dg.node_count() + dg.edge_count());
            let (a, b) = (interpret(&dg).unwrap(), interpret(&s).unwrap());
            assert!(approx_eq(&a, &b, 1e-9), "case {k}\n{}", diagram_to_json(&dg));
            assert_eq!(diagram_to_json(&replay(&dg, &t.steps).unwrap()), diagram_to_json(&s));
        }
        assert!(total_steps > 500);
        println!("{fired:?}");
        assert_eq!(fired.len(), CoreRule::ALL.len(), "{fired:?}");
    }
}
