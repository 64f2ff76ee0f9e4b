use std::fmt;

use thiserror::Error;

use super::sexpr::Pos;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("certificate proves nothing")]
    ProvesNothing,
    #[error("{0}")]
    Invalid(String),
}

/// A parse or validation failure with its source position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

impl ParseError {
    pub fn new(pos: Pos, kind: ErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.kind)
    }
}
