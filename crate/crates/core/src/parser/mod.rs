//! Concrete syntax: tokenizer, recursive-descent parser and printer.

pub mod decl;
pub mod lexer;
mod parse;
pub mod render;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use decl::{AxiomKind, Bindings, DeclKind, Declaration, Defining, Just, ProofScript, Step};
pub use lexer::{tokenize, TokKind, Token};
pub use parse::{parse_construct, parse_construct_in, parse_declarations};
pub use render::{render, render_ascii, render_declaration, render_unicode, Alphabet};

use crate::error::Error;
use crate::syntax::{Construct, Vocabulary};

/// What the parser needs to resolve names: the vocabulary (primary symbols
/// and syntactic variables) and the abbreviation table.
#[derive(Clone, Debug)]
pub struct Context {
    pub vocab: Vocabulary,
    pub abbrevs: BTreeMap<Arc<str>, Construct>,
}

impl Default for Context {
    fn default() -> Self {
        Context::logical()
    }
}

impl Context {
    pub fn logical() -> Context {
        Context {
            vocab: Vocabulary::logical(),
            abbrevs: BTreeMap::new(),
        }
    }

    /// Applies the naming effect of a declaration.
    pub fn apply(&mut self, d: &Declaration) -> Result<(), Error> {
        match &d.kind {
            DeclKind::Abbreviation { name, body }
            | DeclKind::Axiom { name, body }
            | DeclKind::Theorem { name, body, .. } => {
                if self.abbrevs.contains_key(name) {
                    return Err(Error::Redeclared {
                        name: name.to_string(),
                        detail: "abbreviation already defined".into(),
                    });
                }
                self.abbrevs.insert(name.clone(), body.clone());
                Ok(())
            }
            DeclKind::Primary { symbol, .. } => self.vocab.install(symbol.clone()),
            DeclKind::SynVars { names, mode } => {
                for n in names {
                    self.vocab.declare_synvar(n, *mode)?;
                }
                Ok(())
            }
        }
    }
}
