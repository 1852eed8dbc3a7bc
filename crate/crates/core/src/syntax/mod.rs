pub mod construct;
pub mod garity;
pub mod scope;
pub mod subst;
pub mod vocab;

pub use construct::{Binder, Construct, DefKind, NameStyle, Node, Ref, RefKind, SimpleDef};
pub use garity::{classify_symbol, GArity, Mode, SymbolKind};
pub use scope::{d_names, free_names, free_vars, is_d_free, DNames};
pub use subst::{alpha_eq, canonical, substitute, substitute1, Subst};
pub use vocab::{logical, Symbol, Vocabulary};
