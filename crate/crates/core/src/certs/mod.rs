//! Certificates: a small s-expression language for contradiction arguments
//! about log canonical thresholds, and a sound checker for it.

pub mod ast;
pub mod check;
pub mod error;
pub mod mutate;
pub mod sexpr;

pub use ast::{parse, Certificate, Step, StepKind, Tag};
pub use check::{check_at, check_certificate, Verdict};
pub use error::{ErrorKind, ParseError};
pub use mutate::{mutants, run_mutants, Mutant, MutantOutcome};
