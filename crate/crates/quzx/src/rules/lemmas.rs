//! Lemmas and corollaries derived from the figure rules.

use num_complex::Complex64 as C64;

use super::kit::*;
use super::{get_complex, get_phase, get_range, Expect, Params, Source, Spec};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::generator::GeneratorKind;
use crate::phase::PhaseVector;

pub const NAMES: &[&str] = &[
    "TriangleTranspose",
    "InverseTriangleTranspose",
    "KjOnGreen",
    "ZeroEmpty",
    "ScalarMultiply",
    "ScalarGeneralMult",
    "DboxH",
    "HHdaggerScalar",
    "RedSpiderViaGreen",
    "XFusion",
    "XMultiEdgeFusion",
    "DboxSquare",
    "DboxGreenCopy",
    "DboxGreenDot",
    "DboxOnKjGreen",
    "DboxOnKj",
    "Dualisers",
    "HadamardSlideGreen",
    "DboxSlideGreen",
    "RedKjSlideGreen",
    "RedCap",
    "GreenRedConnectedDWires",
    "HorizontalWire",
    "SlideCup",
    "CopyKj",
    "Spider0ToRedDots",
    "Hopf",
    "MultiEdgeOrientation",
    "TriangleOnRedDot",
    "SucInv",
    "TriangleHopf",
    "TriangleHopfGreen",
    "TriangleHopfCorollary",
    "CnotLikeMove",
    "TriangleCopyLR",
    "Brk2Transpose",
    "GeneralAddition",
    "BrkVariant",
    "OneTriangleKjBetweenGreens",
    "TrianglePiInverse",
];

pub fn source(name: &str) -> Option<Source> {
    if !NAMES.contains(&name) {
        return None;
    }
    Some(match name {
        "RedSpiderViaGreen" | "DboxSquare" | "DboxGreenCopy" | "DboxGreenDot" | "DboxOnKjGreen"
        | "DboxSlideGreen" | "TriangleHopfCorollary" | "HHdaggerScalar" | "DboxH" => Source::Corollary,
        _ => Source::Lemma,
    })
}

/// Sliding a green leg across to the other side of a red spider only works
/// for qubits.
pub fn expect(name: &str, d: usize) -> Expect {
    if name == "HorizontalWire" && d > 2 {
        Expect::Unequal
    } else {
        Expect::Equal
    }
}

pub fn specs(name: &str, d: usize) -> Option<Vec<(&'static str, Spec)>> {
    use Spec::*;
    Some(match name {
        "KjOnGreen" => vec![("a", Phase), ("j", Int(0, d - 1))],
        "ScalarGeneralMult" => vec![("a", Complex), ("b", Complex)],
        "RedSpiderViaGreen" => vec![("j", Int(0, d - 1)), ("n", Int(0, 2)), ("m", Int(1, 2))],
        "XFusion" => vec![("j", Int(0, d - 1)), ("k", Int(0, d - 1)), ("n1", Int(0, 1)), ("m1", Int(0, 1)), ("n2", Int(0, 1)), ("m2", Int(0, 1))],
        "XMultiEdgeFusion" => vec![("j", Int(0, d - 1)), ("k", Int(0, d - 1)), ("r", Int(1, 3))],
        "DboxOnKjGreen" | "DboxOnKj" | "RedKjSlideGreen" | "CnotLikeMove" => vec![("j", Int(0, d - 1))],
        "CopyKj" => vec![("j", Int(0, d - 1)), ("m", Int(0, 3))],
        "SlideCup" => vec![("a", Phase)],
        "Spider0ToRedDots" => vec![("n", Int(0, 3)), ("m", Int(0, 3))],
        "MultiEdgeOrientation" => vec![("k", Int(1, d - 1))],
        "GeneralAddition" => vec![("n", Int(2, 4)), ("a", Phase), ("b", Phase), ("c", Phase), ("e", Phase)],
        "OneTriangleKjBetweenGreens" => vec![("j", Int(1, d - 1))],
        _ if NAMES.contains(&name) => vec![],
        _ => return None,
    })
}

/// Left-bent and right-bent transposes of a 1 -> 1 map.
fn bends(d: usize, f: &Diagram) -> Result<(Diagram, Diagram)> {
    let cap = Diagram::cap(d);
    let cup = Diagram::cup(d);
    let right = seq(&[par(&[id(d), cap.clone()]), par(&[id(d), f.clone(), id(d)]), par(&[cup.clone(), id(d)])])?;
    let left = seq(&[par(&[cap, id(d)]), par(&[id(d), f.clone(), id(d)]), par(&[id(d), cup])])?;
    Ok((left, right))
}

/// `|x, y> -> |x, x + y>`.
fn cnot(d: usize) -> Result<Diagram> {
    seq(&[par(&[z1(d, 1, 2)?, id(d)]), par(&[id(d), x(d, 0, 2, 1)?])])
}

pub fn build(name: &str, d: usize, p: &Params) -> Result<(Diagram, Diagram)> {
    let ph = |k: &str| get_phase(p, k, d);
    let jr = |lo: usize| get_range(p, "j", lo, d - 1);
    let tri = Diagram::triangle(d)?;
    let tri_inv = Diagram::triangle_inv(d)?;
    Ok(match name {
        "TriangleTranspose" => bends(d, &tri)?,
        "InverseTriangleTranspose" => bends(d, &tri_inv)?,
        "KjOnGreen" => {
            let a = ph("a")?;
            let j = jr(0)?;
            let lhs = seq(&[par(&[x(d, j, 0, 1)?, id(d)]), z(&a, 2, 1)?])?;
            let rhs = par(&[
                gadget(d, a.weight(d - j))?,
                seq(&[x(d, (d - j) % d, 1, 0)?, x(d, j, 0, 1)?])?,
            ]);
            (lhs, rhs)
        }
        "ZeroEmpty" => (z(&PhaseVector::zeros(d), 0, 0)?, Diagram::empty()),
        "ScalarMultiply" => (
            par(&[z(&PhaseVector::s(d), 0, 0)?, z1(d, 0, 0)?]),
            Diagram::empty(),
        ),
        "ScalarGeneralMult" => {
            let (a, b) = (get_complex(p, "a")?, get_complex(p, "b")?);
            (
                par(&[z(&PhaseVector::last(d, a), 0, 0)?, z(&PhaseVector::last(d, b), 0, 0)?]),
                z(&PhaseVector::last(d, a * b + a + b), 0, 0)?,
            )
        }
        "DboxH" => (seq(&[Diagram::h_dagger(d)?, dbox(d)?])?, id(d)),
        "HHdaggerScalar" => (
            par(&[seq(&[Diagram::h_dagger(d)?, Diagram::h(d)?])?, z(&PhaseVector::s(d), 0, 0)?]),
            id(d),
        ),
        "RedSpiderViaGreen" => {
            let j = jr(0)?;
            let (n, m) = (get_range(p, "n", 0, 4)?, get_range(p, "m", 0, 4)?);
            if n + m == 0 {
                return Err(Error::Param {
                    name: "m".into(),
                    reason: "needs at least one leg".into(),
                });
            }
            let t = (d as f64).powi(1 - (n + m) as i32);
            let lhs = par(&[gadget(d, C64::new(t, 0.0))?, x(d, j, n, m)?]);
            let rhs = seq(&[
                pow(&dbox_dagger(d)?, n),
                z(&PhaseVector::k(d, j), n, m)?,
                pow(&dbox(d)?, m),
            ])?;
            (lhs, rhs)
        }
        "XFusion" => {
            let (j, k) = (jr(0)?, get_range(p, "k", 0, d - 1)?);
            let [n1, m1, n2, m2] = ["n1", "m1", "n2", "m2"].map(|k| get_range(p, k, 0, 4));
            let (n1, m1, n2, m2) = (n1?, m1?, n2?, m2?);
            let lhs = seq(&[
                par(&[x(d, j, n1, m1 + 1)?, ids(d, n2)]),
                par(&[ids(d, m1), x(d, k, 1 + n2, m2)?]),
            ])?;
            (lhs, x(d, (j + k) % d, n1 + n2, m1 + m2)?)
        }
        "XMultiEdgeFusion" => {
            let (j, k) = (jr(0)?, get_range(p, "k", 0, d - 1)?);
            let r = get_range(p, "r", 1, 6)?;
            let mut g = Graph::new(d);
            let a = g.node(GeneratorKind::x(j), 1, r)?;
            let b = g.node(GeneratorKind::x(k), r, 1)?;
            g.input(inp(a, 0));
            for e in 0..r {
                g.wire(out(a, e), inp(b, e));
            }
            g.output(out(b, 0));
            let rhs = par(&[
                x(d, (j + k) % d, 1, 1)?,
                gadget(d, C64::new((d as f64).powi(r as i32 - 1), 0.0))?,
            ]);
            (g.finish(), rhs)
        }
        "DboxSquare" => (
            seq(&[dbox(d)?, dbox(d)?])?,
            par(&[z(&PhaseVector::s(d), 0, 0)?, antipode(d)?]),
        ),
        "DboxGreenCopy" => (
            seq(&[z1(d, 2, 1)?, dbox(d)?])?,
            seq(&[par(&[dbox(d)?, dbox(d)?]), x(d, 0, 2, 1)?])?,
        ),
        "DboxGreenDot" => (seq(&[z1(d, 0, 1)?, dbox(d)?])?, x(d, 0, 0, 1)?),
        "DboxOnKjGreen" => {
            let j = jr(0)?;
            (seq(&[z(&PhaseVector::k(d, j), 0, 1)?, dbox(d)?])?, x(d, j, 0, 1)?)
        }
        "DboxOnKj" => {
            let j = jr(0)?;
            (
                seq(&[x(d, j, 0, 1)?, Diagram::h(d)?])?,
                z(&PhaseVector::k(d, (d - j) % d), 0, 1)?,
            )
        }
        "Dualisers" => (seq(&[antipode(d)?, antipode(d)?])?, id(d)),
        "HadamardSlideGreen" => (
            seq(&[z1(d, 1, 2)?, par(&[Diagram::h(d)?, Diagram::h(d)?])])?,
            seq(&[Diagram::h(d)?, x(d, 0, 1, 2)?])?,
        ),
        "DboxSlideGreen" => (
            seq(&[z1(d, 1, 2)?, par(&[dbox(d)?, dbox(d)?])])?,
            par(&[seq(&[dbox(d)?, x(d, 0, 1, 2)?])?, z(&PhaseVector::s(d), 0, 0)?]),
        ),
        "RedKjSlideGreen" => {
            let j = jr(0)?;
            (
                seq(&[par(&[x(d, j, 1, 1)?, x(d, j, 1, 1)?]), z1(d, 2, 1)?])?,
                seq(&[z1(d, 2, 1)?, x(d, j, 1, 1)?])?,
            )
        }
        "RedCap" => (
            x(d, 0, 0, 2)?,
            seq(&[Diagram::cap(d), par(&[id(d), antipode(d)?])])?,
        ),
        "GreenRedConnectedDWires" => (seq(&[z1(d, 0, d)?, x(d, 0, d, 0)?])?, z1(d, 0, 0)?),
        "HorizontalWire" => {
            // Green copy on wire 0; its spare leg meets the red spider on
            // wire 1 at an input port (lhs) or at an output port (rhs).
            let build = |to_input: bool| -> Result<Diagram> {
                let mut g = Graph::new(d);
                let zc = g.node(GeneratorKind::z(PhaseVector::ones(d)), 1, 2)?;
                let (xn_in, xn_out) = if to_input { (2, 1) } else { (1, 2) };
                let xr = g.node(GeneratorKind::x(0), xn_in, xn_out)?;
                g.input(inp(zc, 0));
                g.input(inp(xr, 0));
                if to_input {
                    g.wire(out(zc, 1), inp(xr, 1));
                } else {
                    g.wire(out(zc, 1), out(xr, 1));
                }
                g.output(out(zc, 0));
                g.output(out(xr, 0));
                Ok(g.finish())
            };
            (build(true)?, build(false)?)
        }
        "SlideCup" => {
            let a = ph("a")?;
            (
                seq(&[x(d, 0, 0, 2)?, par(&[z(&a, 1, 1)?, id(d)])])?,
                seq(&[x(d, 0, 0, 2)?, par(&[id(d), z(&a.reversed(), 1, 1)?])])?,
            )
        }
        "CopyKj" => {
            let j = jr(0)?;
            let m = get_range(p, "m", 0, 6)?;
            (seq(&[x(d, j, 0, 1)?, z1(d, 1, m)?])?, pow(&x(d, j, 0, 1)?, m))
        }
        "Spider0ToRedDots" => {
            let (n, m) = (get_range(p, "n", 0, 6)?, get_range(p, "m", 0, 6)?);
            (
                z(&PhaseVector::zeros(d), n, m)?,
                par(&[pow(&x(d, 0, 1, 0)?, n), pow(&x(d, 0, 0, 1)?, m)]),
            )
        }
        "Hopf" => {
            let mut g = Graph::new(d);
            let zc = g.node(GeneratorKind::z(PhaseVector::ones(d)), 1, 2)?;
            let xr = g.node(GeneratorKind::x(0), 1, 2)?;
            g.input(inp(zc, 0));
            g.wire(out(zc, 0), inp(xr, 0));
            g.wire(out(zc, 1), out(xr, 0));
            g.output(out(xr, 1));
            (g.finish(), par(&[z1(d, 1, 0)?, x(d, 0, 0, 1)?]))
        }
        "MultiEdgeOrientation" => {
            let k = get_range(p, "k", 1, d - 1)?;
            // k wires into red inputs equal d - k wires into red outputs.
            let build = |n: usize, into_inputs: bool| -> Result<Diagram> {
                let mut g = Graph::new(d);
                let zc = g.node(GeneratorKind::z(PhaseVector::ones(d)), 1, n)?;
                let xr = if into_inputs {
                    g.node(GeneratorKind::x(0), n, 1)?
                } else {
                    g.node(GeneratorKind::x(0), 0, n + 1)?
                };
                g.input(inp(zc, 0));
                for e in 0..n {
                    if into_inputs {
                        g.wire(out(zc, e), inp(xr, e));
                    } else {
                        g.wire(out(zc, e), out(xr, e + 1));
                    }
                }
                g.output(out(xr, 0));
                Ok(g.finish())
            };
            (build(k, true)?, build(d - k, false)?)
        }
        "TriangleOnRedDot" => (seq(&[x(d, 0, 0, 1)?, tri_inv])?, x(d, 0, 0, 1)?),
        "SucInv" => (seq(&[z1(d, 0, 1)?, t_inv_transpose(d)?])?, x(d, 0, 0, 1)?),
        "TriangleHopf" => (hadamard_product(d, &id(d), &tri_inv)?, id(d)),
        "TriangleHopfGreen" => (hadamard_product(d, &id(d), &tri)?, id(d)),
        "TriangleHopfCorollary" => (hadamard_product(d, &id(d), &t_transpose(d)?)?, id(d)),
        "CnotLikeMove" => {
            let j = jr(0)?;
            (
                seq(&[par(&[x(d, j, 1, 1)?, id(d)]), cnot(d)?])?,
                seq(&[cnot(d)?, par(&[x(d, j, 1, 1)?, x(d, j, 1, 1)?])])?,
            )
        }
        "TriangleCopyLR" => (hadamard_product(d, &tri_inv, &tri_inv)?, tri),
        "Brk2Transpose" => {
            let tt = t_transpose(d)?;
            let tit = t_inv_transpose(d)?;
            (hadamard_product(d, &tt, &tit)?, tit)
        }
        "GeneralAddition" => {
            let n = get_range(p, "n", 2, 4)?;
            let keys = ["a", "b", "c", "e"];
            let phases: Vec<PhaseVector> = keys[..n].iter().map(|k| ph(k)).collect::<Result<_>>()?;
            let states: Vec<Diagram> = phases.iter().map(|a| z(a, 0, 1)).collect::<Result<_>>()?;
            let sum = phases[1..].iter().fold(phases[0].clone(), |acc, a| acc.add(a));
            (seq(&[par(&states), Diagram::w(d, n, 1)?])?, z(&sum, 0, 1)?)
        }
        "BrkVariant" => (tri, seq(&[Diagram::w(d, 1, 2)?, par(&[id(d), z1(d, 1, 0)?])])?),
        "OneTriangleKjBetweenGreens" => {
            let j = jr(1)?;
            (
                hadamard_product(d, &tri, &x(d, j, 1, 1)?)?,
                seq(&[x(d, j, 1, 0)?, x(d, 0, 0, 1)?])?,
            )
        }
        "TrianglePiInverse" => {
            let m = z(&PhaseVector::minus_ones(d), 1, 1)?;
            (tri_inv, seq(&[m.clone(), tri, m])?)
        }
        _ => return Err(Error::UnknownRule(name.to_string())),
    })
}
