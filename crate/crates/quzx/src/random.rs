//! Seeded random diagrams for property tests and demos.

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Diagram, End, Port};
use crate::generator::GeneratorKind;
use crate::phase::PhaseVector;

#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub d: usize,
    pub max_nodes: usize,
    /// Upper bound on legs per spider.
    pub max_legs: usize,
    /// Upper bound on boundary wires.
    pub max_boundary: usize,
}

impl RandomShape {
    pub fn new(d: usize, max_nodes: usize) -> Self {
        RandomShape {
            d,
            max_nodes,
            max_legs: 4,
            max_boundary: 4,
        }
    }
}

pub fn random_phase<R: Rng>(rng: &mut R, d: usize) -> PhaseVector {
    match rng.gen_range(0..4) {
        0 => PhaseVector::ones(d),
        1 => PhaseVector::k(d, rng.gen_range(0..d)),
        2 => PhaseVector::from_angles(&(1..d).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>()),
        _ => PhaseVector::new(
            (1..d)
                .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect(),
        ),
    }
}

fn random_kind<R: Rng>(rng: &mut R, s: &RandomShape) -> (GeneratorKind, usize, usize) {
    let d = s.d;
    let legs = |rng: &mut R| {
        let total = rng.gen_range(0..=s.max_legs);
        let n_in = rng.gen_range(0..=total);
        (n_in, total - n_in)
    };
    match rng.gen_range(0..12) {
        0..=3 => {
            let (i, o) = legs(rng);
            (GeneratorKind::z(random_phase(rng, d)), i, o)
        }
        4..=6 => {
            let (i, o) = legs(rng);
            (GeneratorKind::x(rng.gen_range(0..d)), i, o)
        }
        7 => (GeneratorKind::H, 1, 1),
        8 => (GeneratorKind::HDagger, 1, 1),
        9 => (GeneratorKind::Triangle, 1, 1),
        10 => (GeneratorKind::TriangleInv, 1, 1),
        _ => {
            let (i, o) = legs(rng);
            (GeneratorKind::WSpider, i, o)
        }
    }
}

/// A valid diagram with between 1 and `max_nodes` nodes, all wires of
/// dimension `d`. Ports are paired at random; a few are left as boundary.
pub fn random_diagram<R: Rng>(rng: &mut R, s: &RandomShape) -> Diagram {
    let d = s.d;
    let mut g = Diagram::empty();
    let n = rng.gen_range(1..=s.max_nodes.max(1));
    let mut ends = Vec::new();
    for _ in 0..n {
        let (kind, i, o) = random_kind(rng, s);
        let id = g.add_node(kind, d, i, o).expect("legal random node");
        ends.extend((0..i).map(|p| End::node(id, Port::In(p))));
        ends.extend((0..o).map(|p| End::node(id, Port::Out(p))));
    }
    ends.shuffle(rng);
    let mut b = rng.gen_range(0..=s.max_boundary.min(ends.len()));
    if (ends.len() - b) % 2 == 1 {
        if b > 0 {
            b -= 1;
        } else {
            b += 1;
        }
    }
    let (open, paired) = ends.split_at(b);
    for pair in paired.chunks(2) {
        g.add_edge(pair[0], pair[1], d);
    }
    for &e in open {
        if rng.gen_bool(0.5) {
            let slot = g.push_input(d);
            g.add_edge(End::Input(slot), e, d);
        } else {
            let slot = g.push_output(d);
            g.add_edge(e, End::Output(slot), d);
        }
    }
    g.set_scalar(C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)));
    g
}
