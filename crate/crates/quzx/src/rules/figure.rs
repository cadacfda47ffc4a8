//! Rules of the three rule figures.

use num_complex::Complex64 as C64;

use super::kit::*;
use super::{get_complex, get_int, get_phase, get_range, Params, Source, Spec};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::phase::{tau_angle, PhaseVector};

pub const NAMES: &[&str] = &[
    "S1", "S2", "S3", "Ept", "B1", "B2", "B3", "K1", "K2", "EU", "Zer", "H1", "P1", "D1", "Sca",
    "Bs0", "Bsj", "Suc", "Inv", "Pcy", "AD", "Sym", "Aso", "Whf", "Brk", "DT", "Tre", "TKj", "Brk2",
    "BinderUnit1", "BinderUnit2", "BinderAssoc", "BinderGSpider", "BinderWith1R", "BinderWith1L",
];

pub fn source(name: &str) -> Option<Source> {
    let k = NAMES.iter().position(|n| *n == name)?;
    Some(match k {
        0..=14 => Source::Figure1,
        15..=28 => Source::Figure2,
        _ => Source::Figure3,
    })
}

pub fn specs(name: &str, d: usize) -> Option<Vec<(&'static str, Spec)>> {
    use Spec::*;
    let arity = Int(0, 3);
    Some(match name {
        "S1" => vec![("a", Phase), ("b", Phase), ("n1", Int(0, 1)), ("m1", Int(0, 1)), ("n2", Int(0, 1)), ("m2", Int(0, 1))],
        "Ept" => vec![("a", Phase)],
        "B1" | "B3" => vec![("m", arity)],
        "K1" => vec![("j", Int(0, d - 1)), ("m", arity)],
        "K2" | "P1" => vec![("a", Phase), ("j", Int(0, d - 1)), ("m", arity)],
        "Zer" => vec![("n", Int(0, 2)), ("m", Int(0, 2))],
        "D1" => vec![("a", Phase), ("i", Int(1, d - 1))],
        "Sca" => vec![("a", Complex), ("b", Complex)],
        "Bsj" | "TKj" => vec![("j", Int(1, d - 1))],
        "Pcy" => vec![("a", Phase), ("m", Int(1, 3))],
        "AD" => vec![("a", Phase), ("b", Phase)],
        "BinderUnit1" | "BinderUnit2" => vec![("s", Int(1, d)), ("t", Int(1, d))],
        "BinderAssoc" => vec![("s", Int(1, d)), ("t", Int(1, d)), ("u", Int(1, d))],
        "BinderGSpider" => vec![("s", Int(2, d)), ("t", Int(2, d))],
        "BinderWith1R" | "BinderWith1L" => vec![("s", Int(1, d))],
        _ if source(name).is_some() => vec![],
        _ => return None,
    })
}

/// Rejects draws that make a caption divide by zero.
pub fn acceptable(name: &str, d: usize, p: &Params) -> bool {
    if name != "K2" {
        return true;
    }
    match (get_phase(p, "a", d), get_int(p, "j")) {
        (Ok(a), Ok(j)) => a.weight(d - j % d).norm() > 1e-6,
        _ => true,
    }
}

/// `a_{-j}`: the 0-legged spider worth `a_{d-j}`.
fn a_minus_j(a: &PhaseVector, d: usize, j: usize) -> Result<Diagram> {
    gadget(d, a.weight(d - j % d))
}

/// Gauss-type sum `sum_l e^{i tau_l}`.
pub(crate) fn tau_sum(d: usize) -> C64 {
    (0..d).map(|l| C64::from_polar(1.0, tau_angle(d, l))).sum()
}

pub fn build(name: &str, d: usize, p: &Params) -> Result<(Diagram, Diagram)> {
    let ph = |k: &str| get_phase(p, k, d);
    let dm1 = d - 1;
    Ok(match name {
        "S1" => {
            let (a, b) = (ph("a")?, ph("b")?);
            let [n1, m1, n2, m2] = ["n1", "m1", "n2", "m2"].map(|k| get_range(p, k, 0, 8));
            let (n1, m1, n2, m2) = (n1?, m1?, n2?, m2?);
            let lhs = seq(&[
                par(&[z(&a, n1, m1 + 1)?, ids(d, n2)]),
                par(&[ids(d, m1), z(&b, 1 + n2, m2)?]),
            ])?;
            (lhs, z(&a.mul(&b), n1 + n2, m1 + m2)?)
        }
        "S2" => (z1(d, 1, 1)?, id(d)),
        "S3" => (z1(d, 0, 2)?, Diagram::cap(d)),
        "Ept" => (seq(&[x(d, 0, 0, 1)?, z(&ph("a")?, 1, 0)?])?, Diagram::empty()),
        "B1" => {
            let m = get_range(p, "m", 0, 8)?;
            (seq(&[x(d, 0, 0, 1)?, z1(d, 1, m)?])?, pow(&x(d, 0, 0, 1)?, m))
        }
        "B2" => {
            let lhs = seq(&[x(d, 0, 2, 1)?, z1(d, 1, 2)?])?;
            let rhs = seq(&[
                par(&[z1(d, 1, 2)?, z1(d, 1, 2)?]),
                par(&[id(d), Diagram::swap(d, d), id(d)]),
                par(&[x(d, 0, 2, 1)?, x(d, 0, 2, 1)?]),
            ])?;
            (lhs, rhs)
        }
        "B3" => {
            let m = get_range(p, "m", 0, 8)?;
            (seq(&[z1(d, 0, 1)?, x(d, 0, 1, m)?])?, pow(&z1(d, 0, 1)?, m))
        }
        "K1" => {
            let (j, m) = (get_range(p, "j", 0, dm1)?, get_range(p, "m", 0, 8)?);
            let lhs = seq(&[x(d, j, 1, 1)?, z1(d, 1, m)?])?;
            let rhs = seq(&[z1(d, 1, m)?, pow(&x(d, j, 1, 1)?, m)])?;
            (lhs, rhs)
        }
        "K2" => {
            let a = ph("a")?;
            let (j, m) = (get_range(p, "j", 0, dm1)?, get_range(p, "m", 0, 8)?);
            if a.weight(d - j).norm() <= 1e-12 {
                return Err(Error::Param {
                    name: "a".into(),
                    reason: format!("a_{{d-j}} vanishes for j = {j}"),
                });
            }
            let lhs = seq(&[x(d, j, 1, 1)?, z(&a, 1, m)?])?;
            let rhs = par(&[
                a_minus_j(&a, d, j)?,
                seq(&[z(&a.shifted(j), 1, m)?, pow(&x(d, j, 1, 1)?, m)])?,
            ]);
            (lhs, rhs)
        }
        "EU" => {
            let t = PhaseVector::tau(d);
            let lhs = seq(&[
                z(&t, 1, 1)?,
                Diagram::h_dagger(d)?,
                z(&t, 1, 1)?,
                dbox(d)?,
                z(&t, 1, 1)?,
            ])?;
            let rhs = par(&[Diagram::h(d)?, gadget(d, tau_sum(d) / d as f64)?]);
            (lhs, rhs)
        }
        "Zer" => {
            let (n, m) = (get_range(p, "n", 0, 8)?, get_range(p, "m", 0, 8)?);
            let rhs = par(&[pow(&x(d, 0, 1, 0)?, n), pow(&x(d, 0, 0, 1)?, m)]);
            (z(&PhaseVector::zeros(d), n, m)?, rhs)
        }
        "H1" => (Diagram::h_dagger(d)?, seq(&[antipode(d)?, Diagram::h(d)?])?),
        "P1" => {
            let a = ph("a")?;
            let (j, m) = (get_range(p, "j", 0, dm1)?, get_range(p, "m", 0, 8)?);
            let lhs = seq(&[x(d, j, 0, 1)?, z(&a, 1, m)?])?;
            (lhs, par(&[a_minus_j(&a, d, j)?, pow(&x(d, j, 0, 1)?, m)]))
        }
        "D1" => {
            let a = ph("a")?;
            let i = get_range(p, "i", 1, dm1)?;
            let mut sigma = vec![C64::new(0.0, 0.0); dm1];
            sigma[i - 1] = a.entries().iter().sum();
            let lhs = seq(&[z(&a, 0, 1)?, Diagram::h(d)?, x(d, 0, 1, 0)?])?;
            (lhs, z(&PhaseVector::new(sigma), 0, 0)?)
        }
        "Sca" => {
            let (a, b) = (get_complex(p, "a")?, get_complex(p, "b")?);
            (par(&[scalar_nf(d, a)?, scalar_nf(d, b)?]), scalar_nf(d, a * b)?)
        }
        "Bs0" => (seq(&[x(d, 0, 0, 1)?, Diagram::triangle(d)?])?, x(d, 0, 0, 1)?),
        "Bsj" => {
            let j = get_range(p, "j", 1, dm1)?;
            (seq(&[x(d, j, 0, 1)?, Diagram::triangle(d)?])?, z(&PhaseVector::v(d, j), 0, 1)?)
        }
        "Suc" => (seq(&[x(d, 0, 0, 1)?, t_transpose(d)?])?, z1(d, 0, 1)?),
        "Inv" => (seq(&[Diagram::triangle_inv(d)?, Diagram::triangle(d)?])?, id(d)),
        "Pcy" => {
            let a = ph("a")?;
            let m = get_range(p, "m", 1, 8)?;
            let lhs = seq(&[z(&a, 1, 1)?, Diagram::w(d, 1, m)?])?;
            let rhs = seq(&[Diagram::w(d, 1, m)?, pow(&z(&a, 1, 1)?, m)])?;
            (lhs, rhs)
        }
        "AD" => {
            let (a, b) = (ph("a")?, ph("b")?);
            let lhs = seq(&[par(&[z(&a, 0, 1)?, z(&b, 0, 1)?]), Diagram::w(d, 2, 1)?])?;
            (lhs, z(&a.add(&b), 0, 1)?)
        }
        "Sym" => (Diagram::w(d, 1, 2)?, seq(&[Diagram::w(d, 1, 2)?, Diagram::swap(d, d)])?),
        "Aso" => {
            let w = Diagram::w(d, 1, 2)?;
            (
                seq(&[w.clone(), par(&[w.clone(), id(d)])])?,
                seq(&[w.clone(), par(&[id(d), w])])?,
            )
        }
        "Whf" => (
            seq(&[Diagram::w(d, 1, 2)?, z1(d, 2, 1)?])?,
            seq(&[x(d, 0, 1, 0)?, x(d, 0, 0, 1)?])?,
        ),
        "Brk" => (
            t_transpose(d)?,
            seq(&[par(&[id(d), z1(d, 0, 1)?]), Diagram::w(d, 2, 1)?])?,
        ),
        "DT" => (
            seq(&[x(d, 0, 0, 1)?, t_transpose(d)?, dbox(d)?])?,
            x(d, 0, 0, 1)?,
        ),
        "Tre" => {
            let t = Diagram::triangle(d)?;
            (hadamard_product(d, &t, &t)?, t)
        }
        "TKj" => {
            let j = get_range(p, "j", 1, dm1)?;
            (seq(&[Diagram::triangle(d)?, x(d, j, 1, 0)?])?, x(d, j, 1, 0)?)
        }
        "Brk2" => {
            let ti = Diagram::triangle_inv(d)?;
            (hadamard_product(d, &Diagram::triangle(d)?, &ti)?, ti)
        }
        "BinderUnit1" => {
            let (s, t) = (get_range(p, "s", 1, 64)?, get_range(p, "t", 1, 64)?);
            (
                seq(&[Diagram::splitter(s, t)?, Diagram::binder(s, t)?])?,
                Diagram::identity(&[s * t]),
            )
        }
        "BinderUnit2" => {
            let (s, t) = (get_range(p, "s", 1, 64)?, get_range(p, "t", 1, 64)?);
            (
                seq(&[Diagram::binder(s, t)?, Diagram::splitter(s, t)?])?,
                Diagram::identity(&[s, t]),
            )
        }
        "BinderAssoc" => {
            let [s, t, u] = ["s", "t", "u"].map(|k| get_range(p, k, 1, 64));
            let (s, t, u) = (s?, t?, u?);
            let lhs = seq(&[
                par(&[Diagram::binder(s, t)?, Diagram::identity(&[u])]),
                Diagram::binder(s * t, u)?,
            ])?;
            let rhs = seq(&[
                par(&[Diagram::identity(&[s]), Diagram::binder(t, u)?]),
                Diagram::binder(s, t * u)?,
            ])?;
            (lhs, rhs)
        }
        "BinderGSpider" => {
            let (s, t) = (get_range(p, "s", 2, 64)?, get_range(p, "t", 2, 64)?);
            let b = Diagram::binder(s, t)?;
            let lhs = seq(&[b.clone(), z1(s * t, 1, 2)?])?;
            let rhs = seq(&[
                par(&[z1(s, 1, 2)?, z1(t, 1, 2)?]),
                Diagram::permutation(&[s, s, t, t], &[0, 2, 1, 3])?,
                par(&[b.clone(), b]),
            ])?;
            (lhs, rhs)
        }
        "BinderWith1R" => {
            let s = get_range(p, "s", 1, 64)?;
            (
                Diagram::binder(s, 1)?,
                seq(&[Diagram::swap(s, 1), Diagram::binder(1, s)?])?,
            )
        }
        "BinderWith1L" => {
            let s = get_range(p, "s", 1, 64)?;
            (
                Diagram::binder(1, s)?,
                seq(&[Diagram::swap(1, s), Diagram::binder(s, 1)?])?,
            )
        }
        _ => return Err(Error::UnknownRule(name.to_string())),
    })
}

/// `(Bsj)` upside down: the copoint `K_j` after the transposed triangle is
/// the green copoint `V_{d-j}`.
pub fn bsj_flipped(d: usize, p: &Params) -> Result<(Diagram, Diagram)> {
    let j = get_range(p, "j", 1, d - 1)?;
    Ok((
        seq(&[t_transpose(d)?, x(d, j, 1, 0)?])?,
        z(&PhaseVector::v(d, d - j), 1, 0)?,
    ))
}
