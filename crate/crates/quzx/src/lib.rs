//! Qudit and qufinite ZX-calculus: diagrams, their tensor semantics,
//! rewrite rules, a simplifier and normal forms.

pub mod diagram;
pub mod error;
pub mod eval;
pub mod generator;
pub mod cli;
pub mod io;
pub mod normal_form;
pub mod phase;
pub mod random;
pub mod rewrite;
pub mod rules;
pub mod tensor;

pub use diagram::{Diagram, End, Port};
pub use error::{Error, Result};
pub use eval::{interpret, Evaluator};
pub use generator::GeneratorKind;
pub use phase::PhaseVector;
pub use tensor::DenseTensor;
pub use num_complex::Complex64 as C64;
