use std::fmt;
use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("invalid declaration: {0}")]
    Declaration(String),
    #[error("unknown peer process `{0}`")]
    UnknownPeer(String),
    #[error("i/o command outside a loop guard")]
    IoOutsideGuard,
    #[error("variable `{0}` is declared by more than one process")]
    SharedVariable(String),
    #[error("duplicate assignment target `{0}`")]
    DuplicateTarget(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}
