//! Batch front-end. Parsing lives here so the binary stays a one-liner.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{Evaluator, DEFAULT_CAP};
use crate::io::{diagram_from_json, diagram_to_json, tensor_to_json, Matrix};
use crate::normal_form::matrix_normal_form;
use crate::rewrite::simplify_with;
use crate::rules::{verify_lemmas_with, verify_rules_with, VerificationReport, VerifyOptions};
use crate::tensor::{approx_eq, max_deviation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Synth,
    Simplify,
    VerifyRules,
    Lemmas,
    Roundtrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Second input for `roundtrip`: a previously synthesized diagram.
    pub diagram: Option<PathBuf>,
    pub d_range: Vec<usize>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub max_steps: usize,
    pub cap: u128,
    pub trace: Option<PathBuf>,
    pub format: Format,
}

impl CommandConfig {
    pub fn new(command: Command) -> Self {
        CommandConfig {
            command,
            input: None,
            output: None,
            diagram: None,
            d_range: vec![2, 3, 4, 5],
            seed: 0,
            trials: 5,
            tol: 1e-10,
            max_steps: 10_000,
            cap: crate::eval::default_cap(),
            trace: None,
            format: Format::Json,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Error::Param {
            name: name.into(),
            reason: reason.into(),
        };
        if !(self.tol > 0.0) {
            return Err(bad("tol", "must be positive"));
        }
        if self.cap < 1 << 16 {
            return Err(bad("cap", "must be at least 2^16"));
        }
        if self.d_range.iter().any(|&d| !(2..=16).contains(&d)) {
            return Err(bad("d", "dimensions must lie in 2..=16"));
        }
        Ok(())
    }
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// 0 when every check passed, 1 on a failed check, 2 on bad input or
    /// an evaluation error.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn read(path: &Option<PathBuf>, what: &str) -> Result<(String, PathBuf)> {
    let p = path.clone().ok_or_else(|| Error::Param {
        name: what.into(),
        reason: "path required".into(),
    })?;
    let text = std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    Ok((text, p))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `--output` when given, otherwise returns it for stdout.
fn emit(cfg: &CommandConfig, text: String) -> Result<String> {
    match &cfg.output {
        Some(p) => {
            write(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct RoundtripReport {
    rows: usize,
    cols: usize,
    max_dev: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SimplifySummary {
    steps: usize,
    exhausted: bool,
    nodes_before: usize,
    nodes_after: usize,
}

fn report_outcome(cfg: &CommandConfig, r: &VerificationReport) -> Result<Outcome> {
    let json = r.to_json();
    let table = r.to_table();
    let stdout = match (&cfg.output, cfg.format) {
        (Some(p), f) => {
            write(p, &json)?;
            if f == Format::Table {
                table
            } else {
                String::new()
            }
        }
        (None, Format::Json) => json,
        (None, Format::Table) => table,
    };
    Ok(Outcome {
        code: if r.all_passed() { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn run_inner(cfg: &CommandConfig) -> Result<Outcome> {
    cfg.check()?;
    let ev = Evaluator::new(cfg.cap);
    match cfg.command {
        Command::Eval => {
            let (text, p) = read(&cfg.input, "input")?;
            let d = in_file(&p, diagram_from_json(&text))?;
            let t = ev.interpret(&d)?;
            Ok(Outcome::ok(emit(cfg, tensor_to_json(&t))?))
        }
        Command::Synth => {
            let (text, p) = read(&cfg.input, "input")?;
            let m = in_file(&p, Matrix::from_json(&text))?;
            Ok(Outcome::ok(emit(cfg, diagram_to_json(&matrix_normal_form(&m)?))?))
        }
        Command::Simplify => {
            let (text, p) = read(&cfg.input, "input")?;
            let d = in_file(&p, diagram_from_json(&text))?;
            let (s, trace) = simplify_with(&d, cfg.max_steps, &ev)?;
            if let Some(tp) = &cfg.trace {
                write(tp, &trace.to_json())?;
            }
            let summary = SimplifySummary {
                steps: trace.steps.len(),
                exhausted: trace.exhausted,
                nodes_before: d.node_count(),
                nodes_after: s.node_count(),
            };
            Ok(Outcome {
                code: 0,
                stdout: emit(cfg, diagram_to_json(&s))?,
                stderr: serde_json::to_string(&summary).expect("serializable") + "\n",
            })
        }
        Command::VerifyRules | Command::Lemmas => {
            let opt = VerifyOptions {
                seed: cfg.seed,
                trials: cfg.trials,
                tol: cfg.tol,
                cap: cfg.cap,
            };
            let r = if cfg.command == Command::VerifyRules {
                verify_rules_with(&cfg.d_range, &opt)
            } else {
                verify_lemmas_with(&cfg.d_range, &opt)
            };
            report_outcome(cfg, &r)
        }
        Command::Roundtrip => {
            let (text, p) = read(&cfg.input, "input")?;
            let m = in_file(&p, Matrix::from_json(&text))?;
            let d = match &cfg.diagram {
                Some(_) => {
                    let (dt, dp) = read(&cfg.diagram, "diagram")?;
                    in_file(&dp, diagram_from_json(&dt))?
                }
                None => matrix_normal_form(&m)?,
            };
            let got = ev.interpret(&d)?;
            let want = m.to_tensor();
            let (max_dev, pass) = match max_deviation(&got, &want) {
                Some(dev) => (dev, approx_eq(&got, &want, cfg.tol)),
                None => (f64::INFINITY, false),
            };
            let report = RoundtripReport {
                rows: m.rows,
                cols: m.cols,
                max_dev,
                tol: cfg.tol,
                pass,
            };
            let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
            Ok(Outcome {
                code: if pass { 0 } else { 1 },
                stdout: emit(cfg, text)?,
                stderr: String::new(),
            })
        }
    }
}

/// Runs one command. Never panics on bad input; errors become exit code 2.
pub fn run(cfg: &CommandConfig) -> Outcome {
    run_inner(cfg).unwrap_or_else(|e| Outcome::error(&e))
}

fn parse_d_range(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim_start_matches('=').parse().map_err(|_| format!("bad range end in {part:?}"))?;
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad dimension {part:?}"))?);
        }
    }
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "quzx", version, about = "Qudit and qufinite ZX-calculus engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Contraction cap in tensor entries.
    #[arg(long, env = "QUZX_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u128,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Dimensions, e.g. `2,3,4,5` or `2..5`.
    #[arg(long = "d", value_parser = parse_d_range, default_value = "2,3,4,5")]
    pub d_range: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Interpret a diagram file and print its tensor.
    Eval {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build the normal-form diagram of a matrix file.
    Synth {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the core rewrite rules.
    Simplify {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Write the rewrite trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check every figure rule and its flipped form.
    VerifyRules(VerifyArgs),
    /// Check every lemma and corollary.
    Lemmas(VerifyArgs),
    /// Compare a matrix with the interpretation of its normal form.
    Roundtrip {
        input: PathBuf,
        /// Evaluate this diagram instead of synthesizing a fresh one.
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
}

impl Cli {
    pub fn into_config(self) -> CommandConfig {
        let base = |command: Command, c: &Common| CommandConfig {
            output: c.output.clone(),
            cap: c.cap,
            format: c.format,
            ..CommandConfig::new(command)
        };
        match self.command {
            Sub::Eval { input, common } => CommandConfig {
                input: Some(input),
                ..base(Command::Eval, &common)
            },
            Sub::Synth { input, common } => CommandConfig {
                input: Some(input),
                ..base(Command::Synth, &common)
            },
            Sub::Simplify {
                input,
                max_steps,
                trace,
                common,
            } => CommandConfig {
                input: Some(input),
                max_steps,
                trace,
                ..base(Command::Simplify, &common)
            },
            Sub::VerifyRules(a) => verify_config(Command::VerifyRules, a),
            Sub::Lemmas(a) => verify_config(Command::Lemmas, a),
            Sub::Roundtrip {
                input,
                diagram,
                tol,
                common,
            } => CommandConfig {
                input: Some(input),
                diagram,
                tol,
                ..base(Command::Roundtrip, &common)
            },
        }
    }
}

fn verify_config(command: Command, a: VerifyArgs) -> CommandConfig {
    CommandConfig {
        d_range: a.d_range,
        seed: a.seed,
        trials: a.trials,
        tol: a.tol,
        output: a.common.output,
        cap: a.common.cap,
        format: a.common.format,
        ..CommandConfig::new(command)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// printing to the real stdout and stderr. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = run(&cli.into_config());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
