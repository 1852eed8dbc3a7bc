//! Generalized arities: finite words over the mode letters `F`, `T`, `D`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The syntactic category of a construct.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Formula.
    F,
    /// Term.
    T,
    /// Definition.
    D,
}

impl Mode {
    pub fn letter(self) -> char {
        match self {
            Mode::F => 'F',
            Mode::T => 'T',
            Mode::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Mode> {
        match c {
            'F' => Some(Mode::F),
            'T' => Some(Mode::T),
            'D' => Some(Mode::D),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A non-empty sequence of modes. The last letter is the result mode, the
/// prefix lists the argument modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GArity(Vec<Mode>);

impl GArity {
    pub fn new(letters: Vec<Mode>) -> Result<GArity, Error> {
        if letters.is_empty() {
            return Err(Error::BadArity(String::new()));
        }
        Ok(GArity(letters))
    }

    /// The one-letter arity of a nullary symbol or variable of the given mode.
    pub fn single(m: Mode) -> GArity {
        GArity(vec![m])
    }

    pub fn term() -> GArity {
        GArity(vec![Mode::T])
    }

    pub fn letters(&self) -> &[Mode] {
        &self.0
    }

    pub fn result(&self) -> Mode {
        *self.0.last().expect("arity is non-empty")
    }

    pub fn args(&self) -> &[Mode] {
        &self.0[..self.0.len() - 1]
    }

    pub fn arg_count(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_nullary(&self) -> bool {
        self.0.len() == 1
    }
}

impl FromStr for GArity {
    type Err = Error;

    fn from_str(s: &str) -> Result<GArity, Error> {
        let letters = s
            .chars()
            .map(|c| Mode::from_letter(c).ok_or_else(|| Error::BadArity(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(Error::BadArity(s.to_string()));
        }
        Ok(GArity(letters))
    }
}

impl fmt::Display for GArity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.0 {
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

/// The symbol classes induced by an arity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Constant,
    RelationSymbol,
    FunctionSymbol,
    DefinitionSymbol,
    /// An ordinary variable introduced by a definition of variables.
    Variable,
    /// A metavariable introduced by a declaration of variables.
    SyntacticVariable,
}

/// Classifies a primary symbol by its arity. `"T"` is a constant; otherwise the
/// last letter decides. A nullary `"F"` (e.g. `true`) is a relation symbol and
/// a nullary `"D"` a definition symbol.
pub fn classify_symbol(g: &GArity) -> SymbolKind {
    match (g.result(), g.is_nullary()) {
        (Mode::T, true) => SymbolKind::Constant,
        (Mode::T, false) => SymbolKind::FunctionSymbol,
        (Mode::F, _) => SymbolKind::RelationSymbol,
        (Mode::D, _) => SymbolKind::DefinitionSymbol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GArity {
        s.parse().unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_symbol(&g("TTF")), SymbolKind::RelationSymbol);
        assert_eq!(classify_symbol(&g("T")), SymbolKind::Constant);
        assert_eq!(classify_symbol(&g("DTDD")), SymbolKind::DefinitionSymbol);
        assert_eq!(classify_symbol(&g("TTT")), SymbolKind::FunctionSymbol);
        assert_eq!(classify_symbol(&g("F")), SymbolKind::RelationSymbol);
    }

    #[test]
    fn bad_arities() {
        assert!("".parse::<GArity>().is_err());
        assert!("TXF".parse::<GArity>().is_err());
        assert!("ttf".parse::<GArity>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["T", "FF", "DTDD", "FTTT"] {
            assert_eq!(g(s).to_string(), s);
        }
    }
}
