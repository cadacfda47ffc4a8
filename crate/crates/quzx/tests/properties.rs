use proptest::prelude::*;
use quzx::eval::{interpret, plan_contraction, Evaluator};
use quzx::io::{diagram_from_json, diagram_to_json};
use quzx::random::{random_diagram, RandomShape};
use quzx::rewrite::{extract_scalar, simplify};
use quzx::rules::kit::{inp, out, Graph};
use quzx::tensor::approx_eq;
use quzx::{DenseTensor, Diagram, Error, GeneratorKind, PhaseVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn small_box(seed: u64, d: usize, n_in: usize, n_out: usize) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = PhaseVector::new((1..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
    let kind = match rng.gen_range(0..3) {
        0 => GeneratorKind::z(phase),
        1 => GeneratorKind::x(rng.gen_range(0..d)),
        _ => GeneratorKind::WSpider,
    };
    Diagram::generator(kind, d, n_in, n_out)
        .unwrap()
        .with_scalar(C64::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)))
}

// Rows are outputs, columns inputs.
fn matrix(t: &DenseTensor, n_out: usize) -> (usize, usize, Vec<C64>) {
    let (r, c) = t.matrix_shape(n_out);
    (r, c, t.data.clone())
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm()))
}

fn random_case(seed: u64, d: usize, nodes: usize) -> Diagram {
    random_diagram(&mut ChaCha8Rng::seed_from_u64(seed), &RandomShape::new(d, nodes))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequential_composition_is_matrix_product(
        sa in any::<u64>(), sb in any::<u64>(), d in 2usize..=3,
        k in 0usize..=2, m in 1usize..=2, n in 0usize..=2,
    ) {
        let a = small_box(sa, d, k, m);
        let b = small_box(sb, d, m, n);
        let (ar, ac, ad) = matrix(&interpret(&a).unwrap(), m);
        let (br, bc, bd) = matrix(&interpret(&b).unwrap(), n);
        prop_assert_eq!(ar, bc);
        let mut want = vec![ZERO; br * ac];
        for i in 0..br {
            for j in 0..ac {
                want[i * ac + j] = (0..ar).map(|l| bd[i * bc + l] * ad[l * ac + j]).sum();
            }
        }
        let got = interpret(&a.compose_seq(&b).unwrap()).unwrap();
        prop_assert!(close(&got.data, &want, 1e-12));
    }

    #[test]
    fn parallel_composition_is_kronecker(
        sa in any::<u64>(), sb in any::<u64>(), d in 2usize..=3,
        ka in 0usize..=2, ma in 0usize..=2, kb in 0usize..=2, mb in 0usize..=2,
    ) {
        let a = small_box(sa, d, ka, ma);
        let b = small_box(sb, d, kb, mb);
        let (ar, ac, ad) = matrix(&interpret(&a).unwrap(), ma);
        let (br, bc, bd) = matrix(&interpret(&b).unwrap(), mb);
        let (rows, cols) = (ar * br, ac * bc);
        let mut want = vec![ZERO; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                let (i1, i2, j1, j2) = (i / br, i % br, j / bc, j % bc);
                want[i * cols + j] = ad[i1 * ac + j1] * bd[i2 * bc + j2];
            }
        }
        let got = interpret(&a.compose_par(&b)).unwrap();
        prop_assert!(close(&got.data, &want, 1e-12));
    }

    #[test]
    fn transpose_and_adjoint(seed in any::<u64>(), d in 2usize..=4) {
        // Transposing reverses the boundary order on both sides.
        let dg = random_case(seed, d, 5);
        let n_out = dg.outputs().len();
        let t = interpret(&dg).unwrap();
        let tt = interpret(&dg.transpose()).unwrap();
        let at = interpret(&dg.adjoint()).unwrap();
        let strides = t.strides();
        for off in 0..t.len() {
            let idx: Vec<usize> = strides.iter().zip(&t.axis_dims).map(|(s, n)| off / s % n).collect();
            let (outs, ins) = idx.split_at(n_out);
            let flipped: Vec<usize> = ins.iter().rev().chain(outs.iter().rev()).copied().collect();
            let v = t.data[off];
            prop_assert!((tt.get(&flipped) - v).norm() <= 1e-12 * (1.0 + v.norm()));
            prop_assert!((at.get(&flipped) - v.conj()).norm() <= 1e-12 * (1.0 + v.norm()));
        }
        prop_assert!(approx_eq(&interpret(&dg.transpose().transpose()).unwrap(), &t, 1e-12));
        prop_assert!(approx_eq(&interpret(&dg.adjoint().adjoint()).unwrap(), &t, 1e-12));
    }

    #[test]
    fn contraction_order_does_not_matter(seed in any::<u64>(), plan_seed in any::<u64>(), d in 2usize..=4) {
        let dg = random_case(seed, d, 8);
        let ev = Evaluator::default();
        let greedy = ev.interpret(&dg).unwrap();
        let plan = ev.random_plan(&dg, &mut ChaCha8Rng::seed_from_u64(plan_seed)).unwrap();
        let other = ev.interpret_with_plan(&dg, &plan).unwrap();
        prop_assert!(approx_eq(&greedy, &other, 1e-12));
    }

    #[test]
    fn simplify_is_deterministic_and_idempotent(seed in any::<u64>(), d in 2usize..=4) {
        let dg = random_case(seed, d, 10);
        let (a, ta) = simplify(&dg, 1000).unwrap();
        let (b, tb) = simplify(&dg, 1000).unwrap();
        prop_assert_eq!(diagram_to_json(&a), diagram_to_json(&b));
        prop_assert_eq!(ta.to_json(), tb.to_json());
        let (again, t2) = simplify(&a, 1000).unwrap();
        prop_assert!(t2.steps.is_empty());
        prop_assert_eq!(diagram_to_json(&again), diagram_to_json(&a));
    }

    #[test]
    fn schema_round_trip(seed in any::<u64>(), d in 2usize..=5) {
        let dg = random_case(seed, d, 8);
        let text = diagram_to_json(&dg);
        let back = diagram_from_json(&text).unwrap();
        prop_assert_eq!(&back, &dg);
        prop_assert_eq!(diagram_to_json(&back), text);
    }
}

#[test]
fn contraction_order_over_200_diagrams() {
    let ev = Evaluator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for k in 0..200 {
        let dg = random_diagram(&mut rng, &RandomShape::new(2 + k % 3, 8));
        let plan = ev.random_plan(&dg, &mut rng).unwrap();
        let (a, b) = (ev.interpret(&dg).unwrap(), ev.interpret_with_plan(&dg, &plan).unwrap());
        assert!(approx_eq(&a, &b, 1e-12), "case {k}");
    }
}

#[test]
fn snake_identity() {
    for d in 2..=5 {
        let id = Diagram::identity(&[d]);
        let snake = Diagram::cap(d)
            .compose_par(&id)
            .compose_seq(&id.compose_par(&Diagram::cup(d)))
            .unwrap();
        // cap on outputs 0,1 then cup on outputs 1,2 leaves input -> output 0
        let other = id
            .compose_par(&Diagram::cap(d))
            .compose_seq(&Diagram::cup(d).compose_par(&id))
            .unwrap();
        let want = interpret(&id).unwrap();
        assert!(approx_eq(&interpret(&snake).unwrap(), &want, 1e-12));
        assert!(approx_eq(&interpret(&other).unwrap(), &want, 1e-12));
    }
}

#[test]
fn single_cap_is_the_sum_of_pairs() {
    let t = interpret(&Diagram::cap(3)).unwrap();
    assert_eq!(t.axis_dims, vec![3, 3]);
    let ones: Vec<f64> = t.data.iter().map(|c| c.re).collect();
    assert_eq!(ones, vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]);
}

#[test]
fn chain_of_boxes_peaks_at_one_matrix() {
    for k in 1..=6 {
        let h = Diagram::h(3).unwrap();
        let mut chain = h.clone();
        for _ in 1..k {
            chain = chain.compose_seq(&h).unwrap();
        }
        assert_eq!(plan_contraction(&chain).unwrap().peak, 9, "k={k}");
    }
    assert_eq!(plan_contraction(&Diagram::h(3).unwrap()).unwrap().steps.len(), 0);
}

#[test]
fn dense_blob_hits_the_cap() {
    // Eight red spiders, pairwise connected, two legs to the boundary:
    // 30 wires at d = 5.
    let mut g = Graph::new(5);
    let ids: Vec<_> = (0..8).map(|i| g.node(GeneratorKind::x(i % 5), 1, 8).unwrap()).collect();
    let mut used = vec![0usize; 8];
    for a in 0..8 {
        for b in a + 1..8 {
            g.wire(out(ids[a], used[a]), out(ids[b], used[b]));
            used[a] += 1;
            used[b] += 1;
        }
    }
    for (i, &n) in ids.iter().enumerate() {
        g.input(inp(n, 0));
        if used[i] < 8 {
            g.output(out(n, used[i]));
        }
    }
    let dg = g.finish();
    assert_eq!(dg.edge_count(), 28 + 8 + 8);
    match interpret(&dg) {
        Err(Error::CapExceeded { .. }) => {}
        other => panic!("expected cap error, got {other:?}"),
    }
}

#[test]
fn hadamard_conjugation_is_the_red_spider() {
    for d in 2..=5 {
        for j in 0..d {
            let z = Diagram::z(PhaseVector::k(d, j), 1, 1).unwrap();
            let conj = Diagram::h_dagger(d)
                .unwrap()
                .compose_seq(&z)
                .unwrap()
                .compose_seq(&Diagram::h(d).unwrap())
                .unwrap()
                .with_scalar(C64::new(1.0 / d as f64, 0.0));
            let x = Diagram::x(d, j, 1, 1).unwrap();
            assert!(approx_eq(&interpret(&conj).unwrap(), &interpret(&x).unwrap(), 1e-12), "d={d} j={j}");
        }
    }
}

#[test]
fn gadget_component_is_extracted() {
    for d in 2..=5 {
        let gadget = Diagram::z(PhaseVector::s(d), 0, 0).unwrap();
        let dg = Diagram::h(d).unwrap().compose_par(&gadget);
        let (rest, c) = extract_scalar(&dg).unwrap();
        assert!((c - C64::new(1.0 / d as f64, 0.0)).norm() < 1e-12);
        assert_eq!(rest.node_count(), 1);
        let (same, one) = extract_scalar(&rest).unwrap();
        assert_eq!(one, C64::new(1.0, 0.0));
        assert_eq!(same.node_count(), 1);
    }
}
