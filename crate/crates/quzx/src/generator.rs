//! Generator descriptors and their port typing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhaseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Green spider, `sum_j a_j |j..j><j..j|`.
    ZSpider { phase: PhaseVector },
    /// Red spider labelled `K_j`, interpreted through the index congruence.
    XSpider { label: usize },
    H,
    HDagger,
    Triangle,
    TriangleInv,
    WSpider,
    /// `(s, t) -> s*t`.
    DimBinder { s: usize, t: usize },
    /// `s*t -> (s, t)`.
    DimSplitter { s: usize, t: usize },
}

impl GeneratorKind {
    pub fn z(phase: PhaseVector) -> Self {
        GeneratorKind::ZSpider { phase }
    }

    pub fn x(label: usize) -> Self {
        GeneratorKind::XSpider { label }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::ZSpider { .. } => "z",
            GeneratorKind::XSpider { .. } => "x",
            GeneratorKind::H => "h",
            GeneratorKind::HDagger => "h_dagger",
            GeneratorKind::Triangle => "triangle",
            GeneratorKind::TriangleInv => "triangle_inv",
            GeneratorKind::WSpider => "w",
            GeneratorKind::DimBinder { .. } => "binder",
            GeneratorKind::DimSplitter { .. } => "splitter",
        }
    }

    pub fn is_spider(&self) -> bool {
        matches!(
            self,
            GeneratorKind::ZSpider { .. } | GeneratorKind::XSpider { .. } | GeneratorKind::WSpider
        )
    }

    /// Checks arity, dimension and label constraints for a node of this kind.
    pub fn check(&self, d: usize, n_in: usize, n_out: usize) -> Result<()> {
        let arity = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::Arity {
                    kind: self.name(),
                    n_in,
                    n_out,
                })
            }
        };
        match self {
            GeneratorKind::DimBinder { s, t } | GeneratorKind::DimSplitter { s, t } => {
                if *s == 0 || *t == 0 {
                    return Err(Error::Invalid(format!(
                        "{} needs s, t >= 1, got ({s}, {t})",
                        self.name()
                    )));
                }
                if d != s * t {
                    return Err(Error::Invalid(format!(
                        "{} dimension {d} differs from s*t = {}",
                        self.name(),
                        s * t
                    )));
                }
                match self {
                    GeneratorKind::DimBinder { .. } => arity(n_in == 2 && n_out == 1),
                    _ => arity(n_in == 1 && n_out == 2),
                }
            }
            _ => {
                if d < 2 {
                    return Err(Error::Dimension(d));
                }
                match self {
                    GeneratorKind::ZSpider { phase } => {
                        if phase.len() != d - 1 {
                            return Err(Error::PhaseLength {
                                expected: d - 1,
                                got: phase.len(),
                            });
                        }
                        if !phase.symbolic_consistent(1e-12) {
                            return Err(Error::Invalid(
                                "symbolic K label disagrees with phase entries".into(),
                            ));
                        }
                        Ok(())
                    }
                    GeneratorKind::XSpider { label } => {
                        if *label >= d {
                            Err(Error::Label { label: *label, d })
                        } else {
                            Ok(())
                        }
                    }
                    GeneratorKind::WSpider => Ok(()),
                    _ => arity(n_in == 1 && n_out == 1),
                }
            }
        }
    }

    /// Dimension of input port `i`.
    pub fn input_dim(&self, d: usize, i: usize) -> usize {
        match self {
            GeneratorKind::DimBinder { s, t } => {
                if i == 0 {
                    *s
                } else {
                    *t
                }
            }
            _ => d,
        }
    }

    /// Dimension of output port `i`.
    pub fn output_dim(&self, d: usize, i: usize) -> usize {
        match self {
            GeneratorKind::DimSplitter { s, t } => {
                if i == 0 {
                    *s
                } else {
                    *t
                }
            }
            _ => d,
        }
    }
}
