//! Vocabularies: primary symbols with their arities, syntactic variables and
//! the fixed punctuation.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::construct::Ref;
use super::garity::{GArity, Mode};
use crate::error::Error;

/// Internal names of the logical symbols and predefined definition symbols.
pub mod logical {
    pub const NOT: &str = "~";
    pub const AND: &str = "&";
    pub const OR: &str = "∨";
    pub const IMP: &str = "→";
    pub const IFF: &str = "≡";
    pub const IF: &str = "if";
    pub const TRUE: &str = "true";
    pub const FALSE: &str = "false";
    pub const ALL: &str = "A[";
    pub const EX: &str = "E[";
    pub const ALL_BOUNDED: &str = "A[#2";
    pub const EX_BOUNDED: &str = "E[#2";
    pub const EPS: &str = "H[";
    pub const EQ: &str = "=";
    /// Lifted connectives on definitions.
    pub const DNOT: &str = "~#2";
    pub const DAND: &str = "&#2";
    pub const DOR: &str = "∨#2";
    pub const DIMP: &str = "→#2";
    /// Formula-first lifted connectives (`P & d`).
    pub const PAND: &str = "&#3";
    pub const POR: &str = "∨#3";
    pub const PIMP: &str = "→#3";
    pub const CONCAT: &str = "!";
    pub const HCONCAT: &str = "\\";
    pub const REP: &str = "Rep";

    /// (internal, external, arity)
    pub const TABLE: &[(&str, &str, &str)] = &[
        (NOT, "~", "FF"),
        (AND, "&", "FFF"),
        (OR, "∨", "FFF"),
        (IMP, "→", "FFF"),
        (IFF, "≡", "FFF"),
        (IF, "if", "FTTT"),
        (TRUE, "true", "F"),
        (FALSE, "false", "F"),
        (ALL, "A[", "DF"),
        (EX, "E[", "DF"),
        (ALL_BOUNDED, "A[", "DFF"),
        (EX_BOUNDED, "E[", "DFF"),
        (EPS, "H[", "DT"),
        (EQ, "=", "TTF"),
        (DNOT, "~", "DD"),
        (DAND, "&", "DFD"),
        (DOR, "∨", "DFD"),
        (DIMP, "→", "DFD"),
        (PAND, "&", "FDD"),
        (POR, "∨", "FDD"),
        (PIMP, "→", "FDD"),
        (CONCAT, "!", "DDD"),
        (HCONCAT, "\\", "DDD"),
        (REP, "Rep", "DTDD"),
    ];

    pub fn is_propositional(internal: &str) -> bool {
        matches!(internal, NOT | AND | OR | IMP | IFF | TRUE | FALSE)
    }
}

/// Punctuation symbols of every language.
pub const PUNCTUATION: &[&str] = &["(", ")", "[", "]", "{", "}", ",", ";", "|", ":", ":=", "."];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub internal: Arc<str>,
    pub external: Arc<str>,
    pub arity: GArity,
}

impl Symbol {
    pub fn to_ref(&self) -> Ref {
        Ref::primary(&self.internal, &self.external, self.arity.clone())
    }
}

/// The symbol tables of a language. Primary names and syntactic variables
/// live in separate tables; a syntactic variable may share its external name
/// with a primary symbol of another arity.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    primaries: BTreeMap<Arc<str>, Symbol>,
    by_external: BTreeMap<Arc<str>, Vec<Arc<str>>>,
    synvars: BTreeMap<Arc<str>, Mode>,
}

impl Vocabulary {
    /// The vocabulary holding exactly the logical symbols.
    pub fn logical() -> Vocabulary {
        let mut v = Vocabulary::default();
        for (internal, external, arity) in logical::TABLE {
            let arity: GArity = arity.parse().expect("valid builtin arity");
            v.insert(Symbol {
                internal: Arc::from(*internal),
                external: Arc::from(*external),
                arity,
            })
            .expect("builtin names are unique");
        }
        v
    }

    fn insert(&mut self, sym: Symbol) -> Result<(), Error> {
        if self.primaries.contains_key(&sym.internal) {
            return Err(Error::DuplicateName(sym.internal.to_string()));
        }
        self.by_external
            .entry(sym.external.clone())
            .or_default()
            .push(sym.internal.clone());
        self.primaries.insert(sym.internal.clone(), sym);
        Ok(())
    }

    /// The internal name a new declaration of `external` would receive.
    pub fn next_internal(&self, external: &str) -> String {
        if !self.primaries.contains_key(external) {
            return external.to_string();
        }
        (2..)
            .map(|n| format!("{external}#{n}"))
            .find(|c| !self.primaries.contains_key(c.as_str()))
            .expect("unbounded")
    }

    /// Declares a new primary symbol and returns it.
    pub fn declare(&mut self, external: &str, arity: GArity) -> Result<Symbol, Error> {
        let internal = self.next_internal(external);
        let sym = Symbol {
            internal: Arc::from(internal.as_str()),
            external: Arc::from(external),
            arity,
        };
        self.insert(sym.clone())?;
        Ok(sym)
    }

    /// Installs a symbol with a given internal name.
    pub fn install(&mut self, sym: Symbol) -> Result<(), Error> {
        self.insert(sym)
    }

    pub fn get(&self, internal: &str) -> Option<&Symbol> {
        self.primaries.get(internal)
    }

    /// All primary symbols with the given external name.
    pub fn candidates(&self, external: &str) -> Vec<&Symbol> {
        self.by_external
            .get(external)
            .map(|v| v.iter().filter_map(|i| self.primaries.get(i)).collect())
            .unwrap_or_default()
    }

    pub fn has_external(&self, external: &str) -> bool {
        self.by_external.contains_key(external)
    }

    pub fn primaries(&self) -> impl Iterator<Item = &Symbol> {
        self.primaries.values()
    }

    /// Declares a syntactic variable. Redeclaring with the same mode is a
    /// no-op; with a different mode it is an error.
    pub fn declare_synvar(&mut self, name: &str, mode: Mode) -> Result<(), Error> {
        match self.synvars.get(name) {
            Some(m) if *m == mode => Ok(()),
            Some(m) => Err(Error::Redeclared {
                name: name.to_string(),
                detail: format!("syntactic variable of mode {m}, now {mode}"),
            }),
            None => {
                self.synvars.insert(Arc::from(name), mode);
                Ok(())
            }
        }
    }

    pub fn synvar(&self, name: &str) -> Option<Mode> {
        self.synvars.get(name).copied()
    }

    pub fn synvars(&self) -> impl Iterator<Item = (&Arc<str>, &Mode)> {
        self.synvars.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logical_symbols_have_tabulated_arities() {
        let v = Vocabulary::logical();
        let ar = |i: &str| v.get(i).unwrap().arity.to_string();
        assert_eq!(ar(logical::NOT), "FF");
        assert_eq!(ar(logical::AND), "FFF");
        assert_eq!(ar(logical::IF), "FTTT");
        assert_eq!(ar(logical::TRUE), "F");
        assert_eq!(ar(logical::ALL), "DF");
        assert_eq!(ar(logical::EPS), "DT");
        assert_eq!(ar(logical::EQ), "TTF");
        assert_eq!(ar(logical::REP), "DTDD");
    }

    #[test]
    fn overloads_get_unique_internal_names() {
        let mut v = Vocabulary::logical();
        let a = v.declare("{", "TTT".parse().unwrap()).unwrap();
        let b = v.declare("{", "TT".parse().unwrap()).unwrap();
        assert_ne!(a.internal, b.internal);
        assert_eq!(v.candidates("{").len(), 2);
        assert_eq!(v.candidates("A[").len(), 2);
    }

    #[test]
    fn synvar_redeclaration() {
        let mut v = Vocabulary::logical();
        v.declare_synvar("x", Mode::T).unwrap();
        v.declare_synvar("x", Mode::T).unwrap();
        assert!(v.declare_synvar("x", Mode::F).is_err());
    }
}
