//! Rewrite rules and lemmas as `(lhs, rhs)` diagram pairs, and a semantic
//! verifier that interprets both sides.

mod figure;
pub mod kit;
mod lemmas;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::eval::Evaluator;
use crate::phase::PhaseVector;
use crate::tensor::{approx_eq, max_deviation};

pub use kit::{antipode, dbox, dbox_dagger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Figure1,
    Figure2,
    Figure3,
    Lemma,
    Corollary,
    Derived,
}

/// Whether the two sides are claimed equal or claimed to differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expect {
    Equal,
    Unequal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(usize),
    Complex(C64),
    Phase(PhaseVector),
}

pub type Params = BTreeMap<String, Param>;

pub(crate) fn get_int(p: &Params, name: &str) -> Result<usize> {
    match p.get(name) {
        Some(Param::Int(v)) => Ok(*v),
        Some(_) => Err(param_err(name, "expected an integer")),
        None => Err(param_err(name, "missing")),
    }
}

pub(crate) fn get_complex(p: &Params, name: &str) -> Result<C64> {
    match p.get(name) {
        Some(Param::Complex(v)) => Ok(*v),
        Some(Param::Int(v)) => Ok(C64::new(*v as f64, 0.0)),
        Some(_) => Err(param_err(name, "expected a complex number")),
        None => Err(param_err(name, "missing")),
    }
}

pub(crate) fn get_phase(p: &Params, name: &str, d: usize) -> Result<PhaseVector> {
    match p.get(name) {
        Some(Param::Phase(v)) if v.len() + 1 == d => Ok(v.clone()),
        Some(Param::Phase(v)) => Err(param_err(name, &format!("length {} for d = {d}", v.len()))),
        Some(_) => Err(param_err(name, "expected a phase vector")),
        None => Err(param_err(name, "missing")),
    }
}

pub(crate) fn get_range(p: &Params, name: &str, lo: usize, hi: usize) -> Result<usize> {
    let v = get_int(p, name)?;
    if v < lo || v > hi {
        return Err(param_err(name, &format!("{v} outside {lo}..={hi}")));
    }
    Ok(v)
}

fn param_err(name: &str, reason: &str) -> Error {
    Error::Param {
        name: name.to_string(),
        reason: reason.to_string(),
    }
}

/// How a free variable of a rule is drawn.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Spec {
    Phase,
    Complex,
    Int(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleInstance {
    pub name: String,
    pub d: usize,
    pub params: Params,
    pub lhs: Diagram,
    pub rhs: Diagram,
    pub source: Source,
    pub expect: Expect,
}

impl RuleInstance {
    /// Both sides bent upside down.
    pub fn flipped(&self) -> RuleInstance {
        RuleInstance {
            name: format!("{}~flip", self.name),
            lhs: self.lhs.transpose(),
            rhs: self.rhs.transpose(),
            ..self.clone()
        }
    }
}

/// Figure rules, in registry order.
pub const RULES: &[&str] = figure::NAMES;

/// Lemmas and corollaries, in registry order.
pub const LEMMAS: &[&str] = lemmas::NAMES;

fn instance(name: &str, d: usize, params: &Params, source: Source, expect: Expect, sides: (Diagram, Diagram)) -> Result<RuleInstance> {
    let (lhs, rhs) = sides;
    if lhs.inputs() != rhs.inputs() || lhs.outputs() != rhs.outputs() {
        return Err(Error::Boundary(format!(
            "{name}: lhs {:?}->{:?} vs rhs {:?}->{:?}",
            lhs.inputs(),
            lhs.outputs(),
            rhs.inputs(),
            rhs.outputs()
        )));
    }
    Ok(RuleInstance {
        name: name.to_string(),
        d,
        params: params.clone(),
        lhs,
        rhs,
        source,
        expect,
    })
}

pub fn build_rule(name: &str, d: usize, params: &Params) -> Result<RuleInstance> {
    let source = figure::source(name).ok_or_else(|| Error::UnknownRule(name.to_string()))?;
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    instance(name, d, params, source, Expect::Equal, figure::build(name, d, params)?)
}

/// The stated upside-down form of a figure rule. It is the plain transpose
/// for every rule except `Bsj`, whose flipped form relabels the red dot.
pub fn build_flipped_rule(name: &str, d: usize, params: &Params) -> Result<RuleInstance> {
    if name == "Bsj" {
        let sides = figure::bsj_flipped(d, params)?;
        return instance("Bsj~flip", d, params, Source::Figure2, Expect::Equal, sides);
    }
    Ok(build_rule(name, d, params)?.flipped())
}

pub fn build_lemma(name: &str, d: usize, params: &Params) -> Result<RuleInstance> {
    let source = lemmas::source(name).ok_or_else(|| Error::UnknownRule(name.to_string()))?;
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    let expect = lemmas::expect(name, d);
    instance(name, d, params, source, expect, lemmas::build(name, d, params)?)
}

fn specs(name: &str, d: usize) -> Result<Vec<(&'static str, Spec)>> {
    figure::specs(name, d)
        .or_else(|| lemmas::specs(name, d))
        .ok_or_else(|| Error::UnknownRule(name.to_string()))
}

fn acceptable(name: &str, d: usize, p: &Params) -> bool {
    figure::acceptable(name, d, p)
}

fn sample_phase<R: Rng>(d: usize, rng: &mut R, style: usize) -> PhaseVector {
    match style % 3 {
        0 => PhaseVector::from_angles(&(1..d).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>()),
        1 => PhaseVector::new(
            (1..d)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        ),
        _ => PhaseVector::k(d, rng.gen_range(0..d)),
    }
}

/// Draws the free variables of a rule or lemma. Odd trials use Gaussian
/// complex phases, even trials unit-modulus ones, every third a `K_j`.
pub fn sample_params<R: Rng>(name: &str, d: usize, rng: &mut R, trial: usize) -> Result<Params> {
    let specs = specs(name, d)?;
    for _ in 0..1000 {
        let mut p = Params::new();
        for (k, (key, spec)) in specs.iter().enumerate() {
            let v = match *spec {
                Spec::Phase => Param::Phase(sample_phase(d, rng, trial + k)),
                Spec::Complex => Param::Complex(C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
                Spec::Int(lo, hi) => Param::Int(rng.gen_range(lo..=hi)),
            };
            p.insert(key.to_string(), v);
        }
        if acceptable(name, d, &p) {
            return Ok(p);
        }
    }
    Err(param_err(name, "no acceptable parameter draw"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Largest absolute entry difference; absent when evaluation failed.
    pub max_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Interprets both sides and compares them. For `Expect::Unequal` the
/// check passes when the sides differ beyond `tol`.
pub fn verify_rule(r: &RuleInstance, tol: f64) -> Verdict {
    verify_with(r, tol, &Evaluator::default())
}

pub fn verify_with(r: &RuleInstance, tol: f64, ev: &Evaluator) -> Verdict {
    let sides = ev.interpret(&r.lhs).and_then(|a| Ok((a, ev.interpret(&r.rhs)?)));
    let (a, b) = match sides {
        Ok(v) => v,
        Err(e) => {
            return Verdict {
                status: Status::Inconclusive,
                max_dev: None,
                note: Some(e.to_string()),
            }
        }
    };
    let Some(dev) = max_deviation(&a, &b) else {
        return Verdict {
            status: Status::Fail,
            max_dev: None,
            note: Some(format!("shape {:?} vs {:?}", a.axis_dims, b.axis_dims)),
        };
    };
    let equal = approx_eq(&a, &b, tol);
    let ok = match r.expect {
        Expect::Equal => equal,
        Expect::Unequal => !equal,
    };
    Verdict {
        status: if ok { Status::Pass } else { Status::Fail },
        max_dev: Some(dev),
        note: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub name: String,
    pub d: usize,
    pub trial: usize,
    pub source: Source,
    pub expect: Expect,
    pub params: Params,
    pub status: Status,
    pub max_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
    pub summary: Summary,
}

impl VerificationReport {
    fn push(&mut self, e: ReportEntry) {
        self.summary.total += 1;
        match e.status {
            Status::Pass => self.summary.passed += 1,
            Status::Fail => self.summary.failed += 1,
            Status::Inconclusive => self.summary.inconclusive += 1,
        }
        self.entries.push(e);
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// One line per rule and dimension, worst trial shown.
    pub fn to_table(&self) -> String {
        let mut rows: BTreeMap<(usize, usize), (String, usize, Status, f64, usize)> = BTreeMap::new();
        let mut order: BTreeMap<String, usize> = BTreeMap::new();
        for e in &self.entries {
            let n = order.len();
            let k = *order.entry(e.name.clone()).or_insert(n);
            let dev = e.max_dev.unwrap_or(f64::NAN);
            let row = rows
                .entry((k, e.d))
                .or_insert((e.name.clone(), e.d, Status::Pass, 0.0, 0));
            row.4 += 1;
            if e.status != Status::Pass {
                row.2 = e.status;
            }
            if e.expect == Expect::Equal && (dev.is_nan() || dev > row.3) {
                row.3 = dev;
            } else if e.expect == Expect::Unequal && row.4 == 1 {
                row.3 = dev;
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "{:<28} {:>2} {:>6} {:>12} {}", "rule", "d", "trials", "max_dev", "status");
        for (name, d, status, dev, n) in rows.values() {
            let st = match status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Inconclusive => "INCONCLUSIVE",
            };
            let _ = writeln!(out, "{name:<28} {d:>2} {n:>6} {dev:>12.3e} {st}");
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed, {} inconclusive",
            s.total, s.passed, s.failed, s.inconclusive
        );
        out
    }
}

fn mix(seed: u64, name: &str, d: usize) -> u64 {
    // FNV-1a over the rule name, folded with seed and d.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes().chain(d.to_le_bytes()).chain(seed.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub cap: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            trials: 5,
            tol: 1e-10,
            cap: crate::eval::default_cap(),
        }
    }
}

type Builder = fn(&str, usize, &Params) -> Result<RuleInstance>;

fn sweep(names: &[&str], builders: &[Builder], d_range: &[usize], opt: &VerifyOptions) -> VerificationReport {
    let ev = Evaluator::new(opt.cap);
    let mut report = VerificationReport::default();
    for &name in names {
        for &d in d_range {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(opt.seed, name, d));
            for trial in 0..opt.trials {
                let drawn = sample_params(name, d, &mut rng, trial);
                for build in builders {
                    let built = drawn.clone().and_then(|p| build(name, d, &p));
                    let entry = match built {
                        Ok(r) => {
                            let v = verify_with(&r, opt.tol, &ev);
                            ReportEntry {
                                name: r.name,
                                d,
                                trial,
                                source: r.source,
                                expect: r.expect,
                                params: r.params,
                                status: v.status,
                                max_dev: v.max_dev,
                                note: v.note,
                            }
                        }
                        Err(e) => ReportEntry {
                            name: name.to_string(),
                            d,
                            trial,
                            source: Source::Derived,
                            expect: Expect::Equal,
                            params: drawn.clone().unwrap_or_default(),
                            status: Status::Fail,
                            max_dev: None,
                            note: Some(e.to_string()),
                        },
                    };
                    report.push(entry);
                }
            }
        }
    }
    report
}

/// Every figure rule and its upside-down form, `trials` parameter draws per
/// rule and dimension.
pub fn verify_all(d_range: &[usize], seed: u64, trials: usize) -> VerificationReport {
    verify_rules_with(
        d_range,
        &VerifyOptions {
            seed,
            trials,
            ..Default::default()
        },
    )
}

pub fn verify_rules_with(d_range: &[usize], opt: &VerifyOptions) -> VerificationReport {
    sweep(RULES, &[build_rule, build_flipped_rule], d_range, opt)
}

/// Every lemma and corollary.
pub fn verify_lemmas(d_range: &[usize], seed: u64, trials: usize) -> VerificationReport {
    verify_lemmas_with(
        d_range,
        &VerifyOptions {
            seed,
            trials,
            ..Default::default()
        },
    )
}

pub fn verify_lemmas_with(d_range: &[usize], opt: &VerifyOptions) -> VerificationReport {
    sweep(LEMMAS, &[build_lemma], d_range, opt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failures(r: &VerificationReport) -> Vec<String> {
        r.entries
            .iter()
            .filter(|e| e.status != Status::Pass)
            .map(|e| format!("{} d={} dev={:?} {:?}", e.name, e.d, e.max_dev, e.note))
            .collect()
    }

    #[test]
    fn figure_rules_hold() {
        let r = verify_all(&[2, 3, 4, 5], 1, 3);
        let f = failures(&r);
        assert!(f.is_empty(), "{}", f.join("\n"));
    }

    #[test]
    fn lemmas_hold() {
        let r = verify_lemmas(&[2, 3, 4, 5], 1, 3);
        let f = failures(&r);
        assert!(f.is_empty(), "{}", f.join("\n"));
    }
}
