//! The seven acceptance criteria. Runs without the libtest harness so every
//! criterion prints one line even when output capture is on.

use std::time::{Duration, Instant};

use quzx::eval::{interpret, interpret_kind};
use quzx::io::{diagram_to_json, Matrix};
use quzx::normal_form::{count_row_additions, matrix_normal_form, vector_normal_form, w_normal_form};
use quzx::random::{random_diagram, RandomShape};
use quzx::rewrite::{replay, simplify};
use quzx::rules::{verify_all, verify_lemmas, Expect, Status};
use quzx::tensor::{approx_eq, max_deviation};
use quzx::{Diagram, DenseTensor, GeneratorKind, PhaseVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gauss<R: Rng>(rng: &mut R) -> C64 {
    let n: f64 = rng.sample(rand_distr::StandardNormal);
    let m: f64 = rng.sample(rand_distr::StandardNormal);
    C64::new(n, m)
}

// Naive oracle: one formula per entry, indices decoded digit by digit.
// Axes are outputs first, then inputs, each of dimension d.
fn oracle(kind: &GeneratorKind, d: usize, n_in: usize, n_out: usize) -> DenseTensor {
    let dims: Vec<usize> = match kind {
        GeneratorKind::DimBinder { s, t } => vec![s * t, *s, *t],
        GeneratorKind::DimSplitter { s, t } => vec![*s, *t, s * t],
        _ => vec![d; n_in + n_out],
    };
    let total: usize = dims.iter().product();
    let xi = |k: i64| {
        let a = 2.0 * std::f64::consts::PI * (k.rem_euclid(d as i64) as f64) / d as f64;
        C64::new(a.cos(), a.sin())
    };
    let mut data = Vec::with_capacity(total);
    for off in 0..total {
        let mut idx = vec![0usize; dims.len()];
        let mut rem = off;
        for k in (0..dims.len()).rev() {
            idx[k] = rem % dims[k];
            rem /= dims[k];
        }
        let (outs, ins) = idx.split_at(n_out.min(idx.len()));
        let v = match kind {
            GeneratorKind::ZSpider { phase } => {
                if idx.is_empty() {
                    (0..d).map(|j| if j == 0 { ONE } else { phase.entries()[j - 1] }).sum()
                } else if idx.iter().all(|&i| i == idx[0]) {
                    if idx[0] == 0 {
                        ONE
                    } else {
                        phase.entries()[idx[0] - 1]
                    }
                } else {
                    ZERO
                }
            }
            GeneratorKind::XSpider { label } => {
                let lhs: usize = outs.iter().sum::<usize>() + label;
                let rhs: usize = ins.iter().sum();
                if lhs % d == rhs % d {
                    ONE
                } else {
                    ZERO
                }
            }
            GeneratorKind::H => xi((idx[0] * idx[1]) as i64),
            GeneratorKind::HDagger => xi(-((idx[0] * idx[1]) as i64)),
            GeneratorKind::Triangle | GeneratorKind::TriangleInv => {
                let sign = if matches!(kind, GeneratorKind::Triangle) { 1.0 } else { -1.0 };
                if idx[0] == idx[1] {
                    ONE
                } else if idx[0] == 0 {
                    C64::new(sign, 0.0)
                } else {
                    ZERO
                }
            }
            GeneratorKind::WSpider => {
                // |0..0><0..0| plus, for every nonzero i, one output leg
                // and one input leg carrying i.
                let nz_out: Vec<usize> = outs.iter().copied().filter(|&i| i != 0).collect();
                let nz_in: Vec<usize> = ins.iter().copied().filter(|&i| i != 0).collect();
                let all_zero = nz_out.is_empty() && nz_in.is_empty();
                let one_each = nz_out.len() == 1 && nz_in.len() == 1 && nz_out[0] == nz_in[0];
                if all_zero || one_each {
                    ONE
                } else {
                    ZERO
                }
            }
            GeneratorKind::DimBinder { t, .. } => {
                if idx[0] == idx[1] * t + idx[2] {
                    ONE
                } else {
                    ZERO
                }
            }
            GeneratorKind::DimSplitter { t, .. } => {
                if idx[2] / t == idx[0] && idx[2] % t == idx[1] {
                    ONE
                } else {
                    ZERO
                }
            }
        };
        data.push(v);
    }
    DenseTensor::new(dims, data).unwrap()
}

fn generator_semantics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases = 0;
    for d in 2..=5usize {
        let mut kinds = vec![
            GeneratorKind::H,
            GeneratorKind::HDagger,
            GeneratorKind::Triangle,
            GeneratorKind::TriangleInv,
        ];
        let mut spiders = vec![GeneratorKind::WSpider];
        spiders.extend((0..d).map(GeneratorKind::x));
        spiders.extend((0..d).map(|j| GeneratorKind::z(PhaseVector::k(d, j))));
        spiders.push(GeneratorKind::z(PhaseVector::new((1..d).map(|_| gauss(&mut rng)).collect())));
        let mut shaped: Vec<(GeneratorKind, usize, usize)> = kinds.drain(..).map(|k| (k, 1, 1)).collect();
        for k in spiders {
            for n_in in 0..=3 {
                for n_out in 0..=3 {
                    shaped.push((k.clone(), n_in, n_out));
                }
            }
        }
        for (kind, n_in, n_out) in shaped {
            let got = interpret_kind(&kind, d, n_in, n_out).map_err(|e| e.to_string())?;
            let want = oracle(&kind, d, n_in, n_out);
            ensure(approx_eq(&got, &want, 1e-12), || format!("{} d={d} {n_in}->{n_out}", kind.name()))?;
            cases += 1;
        }
    }
    for s in 1..=5usize {
        for t in 1..=5usize {
            for kind in [GeneratorKind::DimBinder { s, t }, GeneratorKind::DimSplitter { s, t }] {
                let (i, o) = if matches!(kind, GeneratorKind::DimBinder { .. }) { (2, 1) } else { (1, 2) };
                let got = interpret_kind(&kind, s * t, i, o).map_err(|e| e.to_string())?;
                ensure(approx_eq(&got, &oracle(&kind, s * t, i, o), 1e-12), || format!("{} s={s} t={t}", kind.name()))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} generator instances"))
}

fn rule_sweep() -> Check {
    let r = verify_all(&[2, 3, 4, 5], 7, 5);
    ensure(r.all_passed(), || {
        let bad: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.status != Status::Pass)
            .map(|e| format!("{} d={} {:?}", e.name, e.d, e.status))
            .collect();
        format!("{} not passing: {}", bad.len(), bad.join(", "))
    })?;
    Ok(format!("{} checks", r.summary.total))
}

fn lemma_suite() -> Check {
    let r = verify_lemmas(&[2, 3, 4, 5], 7, 5);
    ensure(r.all_passed(), || format!("{} failed, {} inconclusive", r.summary.failed, r.summary.inconclusive))?;
    let mut least = f64::INFINITY;
    for e in r.entries.iter().filter(|e| e.name == "HorizontalWire") {
        let dev = e.max_dev.unwrap_or(0.0);
        if e.d == 2 {
            ensure(e.expect == Expect::Equal && dev <= 1e-10, || format!("d=2 deviation {dev}"))?;
        } else {
            ensure(e.expect == Expect::Unequal && dev >= 0.5, || format!("d={} deviation {dev}", e.d))?;
            least = least.min(dev);
        }
    }
    Ok(format!("{} checks, horizontal-wire deviation >= {least:.3} for d >= 3", r.summary.total))
}

fn vector_tensor(v: &[C64]) -> DenseTensor {
    DenseTensor::from_vector(v.to_vec())
}

fn flat(t: &DenseTensor) -> DenseTensor {
    DenseTensor::from_vector(t.data.clone())
}

fn universality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for d in 2..=5usize {
        for m in 1..=2u32 {
            let n = d.pow(m);
            for _ in 0..100 {
                let v: Vec<C64> = (0..n).map(|_| gauss(&mut rng)).collect();
                let want = vector_tensor(&v);
                for (style, dg) in [
                    ("row-addition", vector_normal_form(&v, d, m as usize)),
                    ("W", w_normal_form(&v, d, m as usize)),
                ] {
                    let dg = dg.map_err(|e| e.to_string())?;
                    let got = flat(&interpret(&dg).map_err(|e| e.to_string())?);
                    worst = worst.max(max_deviation(&got, &want).unwrap_or(f64::INFINITY));
                    ensure(approx_eq(&got, &want, 1e-9), || format!("{style} d={d} m={m}"))?;
                    if style == "row-addition" {
                        let c = count_row_additions(&dg);
                        ensure(c == n - 1, || format!("d={d} m={m}: {c} row additions, expected {}", n - 1))?;
                    }
                }
            }
        }
    }
    for k in 0..50 {
        let (s, t) = loop {
            let (s, t) = (rng.gen_range(1..=24usize), rng.gen_range(1..=24usize));
            if s * t <= 24 {
                break (s, t);
            }
        };
        let m = Matrix::new(s, t, (0..s * t).map(|_| gauss(&mut rng)).collect()).unwrap();
        let got = interpret(&matrix_normal_form(&m).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let want = m.to_tensor();
        worst = worst.max(max_deviation(&got, &want).unwrap_or(f64::INFINITY));
        ensure(approx_eq(&got, &want, 1e-9), || format!("matrix {k}: {s}x{t}"))?;
    }
    Ok(format!("800 vectors, 50 matrices, max deviation {worst:.1e}"))
}

fn delta(dims: &[usize]) -> DenseTensor {
    // Identity on the wires `dims`, axes outputs then inputs.
    let n: usize = dims.iter().product();
    let mut data = vec![ZERO; n * n];
    for i in 0..n {
        data[i * n + i] = ONE;
    }
    let axes: Vec<usize> = dims.iter().chain(dims).copied().collect();
    DenseTensor::new(axes, data).unwrap()
}

fn inverse_identities() -> Check {
    let cases = || -> quzx::Result<Vec<(Diagram, DenseTensor, String)>> {
        let mut out = Vec::new();
        for d in 2..=5usize {
            let t = Diagram::triangle(d)?.compose_seq(&Diagram::triangle_inv(d)?)?;
            out.push((t, delta(&[d]), format!("triangle d={d}")));
            let h = Diagram::h_dagger(d)?.compose_seq(&Diagram::h(d)?)?;
            out.push((h, delta(&[d]).scale(C64::new(d as f64, 0.0)), format!("H d={d}")));
        }
        for s in 2..=5usize {
            for t in 2..=5usize {
                let bs = Diagram::splitter(s, t)?.compose_seq(&Diagram::binder(s, t)?)?;
                out.push((bs, delta(&[s * t]), format!("binder.splitter s={s} t={t}")));
                let sb = Diagram::binder(s, t)?.compose_seq(&Diagram::splitter(s, t)?)?;
                out.push((sb, delta(&[s, t]), format!("splitter.binder s={s} t={t}")));
            }
        }
        Ok(out)
    };
    let cases = cases().map_err(|e| e.to_string())?;
    for (dg, want, what) in &cases {
        let got = interpret(dg).map_err(|e| e.to_string())?;
        ensure(approx_eq(&got, want, 1e-12), || what.clone())?;
    }
    Ok(format!("{} identities", cases.len()))
}

fn simplifier_safety() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut steps = 0;
    for k in 0..500 {
        let dg = random_diagram(&mut rng, &RandomShape::new(2 + k % 3, 10));
        let (s, trace) = simplify(&dg, 10_000).map_err(|e| format!("case {k}: {e}"))?;
        let bound = dg.node_count() + dg.edge_count();
        ensure(trace.steps.len() <= bound, || format!("case {k}: {} steps > {bound}", trace.steps.len()))?;
        let (a, b) = (interpret(&dg).map_err(|e| e.to_string())?, interpret(&s).map_err(|e| e.to_string())?);
        ensure(approx_eq(&a, &b, 1e-9), || format!("case {k}: interpretation changed\n{}", diagram_to_json(&dg)))?;
        let r = replay(&dg, &trace.steps).map_err(|e| e.to_string())?;
        ensure(diagram_to_json(&r) == diagram_to_json(&s), || format!("case {k}: replay differs"))?;
        steps += trace.steps.len();
    }
    Ok(format!("500 diagrams, {steps} rewrite steps"))
}

fn composition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    for s in 1..=6usize {
        for t in 1..=6usize {
            for v in 1..=6usize {
                if s * t * v > 60 {
                    continue;
                }
                let m = Matrix::new(s, t, (0..s * t).map(|_| gauss(&mut rng)).collect()).unwrap();
                let n = Matrix::new(t, v, (0..t * v).map(|_| gauss(&mut rng)).collect()).unwrap();
                let mut prod = vec![ZERO; s * v];
                for i in 0..s {
                    for k in 0..v {
                        prod[i * v + k] = (0..t).map(|j| m.get(i, j) * n.get(j, k)).sum();
                    }
                }
                let want = Matrix::new(s, v, prod).unwrap().to_tensor();
                let dg = matrix_normal_form(&n)
                    .and_then(|nd| nd.compose_seq(&matrix_normal_form(&m)?))
                    .map_err(|e| e.to_string())?;
                let got = interpret(&dg).map_err(|e| e.to_string())?;
                ensure(approx_eq(&got, &want, 1e-8), || format!("s={s} t={t} v={v}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} shape triples"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 7] = [
        ("1 generator semantics", generator_semantics, Some(Duration::from_secs(5))),
        ("2 rule soundness sweep", rule_sweep, Some(Duration::from_secs(120))),
        ("3 lemma suite", lemma_suite, Some(Duration::from_secs(120))),
        ("4 universality round trip", universality, Some(Duration::from_secs(60))),
        ("5 inverse and unitary identities", inverse_identities, None),
        ("6 simplifier safety", simplifier_safety, None),
        ("7 type-matching composition", composition, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let mut res = f();
        let took = start.elapsed();
        if let (Ok(_), Some(l)) = (&res, limit) {
            if took > l {
                res = Err(format!("took {took:.2?}, limit {l:?}"));
            }
        }
        match res {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({took:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
