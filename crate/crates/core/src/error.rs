use thiserror::Error;

use crate::syntax::garity::{GArity, Mode};

/// Source position, 1-based.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed arity {0:?}")]
    BadArity(String),
    #[error("expected mode {expected}, found {found} ({context})")]
    ModeMismatch {
        expected: Mode,
        found: Mode,
        context: String,
    },
    #[error("{symbol} has arity {arity}, cannot take arguments of modes {}", modes(.found))]
    ArityMismatch {
        symbol: String,
        arity: GArity,
        found: Vec<Mode>,
    },
    #[error("name {0} is introduced twice by one definition")]
    DuplicateBinder(String),
    #[error("{0}")]
    Definition(String),
    #[error("duplicate internal name {0}")]
    DuplicateName(String),
    #[error("{name} redeclared: {detail}")]
    Redeclared { name: String, detail: String },
    #[error("{pos}: {msg}")]
    Lex { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("{pos}: unknown name {name}")]
    Unresolved { pos: Pos, name: String },
    #[error("{pos}: ambiguous use of {name}: {candidates}")]
    Ambiguous {
        pos: Pos,
        name: String,
        candidates: String,
    },
    /// A well-formedness failure (mode, arity, binder) in parsed text.
    #[error("{pos}: {msg}")]
    Arity { pos: Pos, msg: String },
    #[error("{0}")]
    Proof(String),
    #[error("tautology check needs {found} atoms, the limit is {limit}")]
    TooManyAtoms { found: usize, limit: usize },
    #[error("{0}")]
    Usage(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    /// An error in a named source, e.g. a file.
    #[error("{origin}:{inner}")]
    Located { origin: String, inner: Box<Error> },
}

fn modes(m: &[Mode]) -> String {
    if m.is_empty() {
        "(none)".into()
    } else {
        m.iter().map(|x| x.letter()).collect()
    }
}

impl Error {
    pub fn parse(pos: Pos, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    /// True for errors that reflect a failed logical check rather than a
    /// malformed input.
    pub fn is_logical(&self) -> bool {
        match self {
            Error::Located { inner, .. } => inner.is_logical(),
            e => matches!(
                e,
                Error::Proof(_) | Error::Arity { .. } | Error::TooManyAtoms { .. }
            ),
        }
    }
}
