//! The unified syntax tree for terms, formulas and definitions.
//!
//! Every node caches its mode, computed and validated when the node is
//! built, so an ill-moded tree cannot be constructed through this API.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::garity::{GArity, Mode};
use crate::error::Error;

/// The textual shape of an external name.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum NameStyle {
    /// Letters and digits, starting with a letter.
    Identifier,
    /// A run of operator characters, or a single mathematical symbol.
    Operator,
    /// An identifier immediately followed by an opening bracket, e.g. `U[`.
    Bracketed,
}

impl NameStyle {
    pub fn of(external: &str) -> NameStyle {
        let mut chars = external.chars();
        match chars.next() {
            Some(c) if c.is_alphabetic() => {
                if external.ends_with('[') {
                    NameStyle::Bracketed
                } else {
                    NameStyle::Identifier
                }
            }
            _ => NameStyle::Operator,
        }
    }
}

/// What a name occurrence refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum RefKind {
    /// A variable: bound by an enclosing definition, or free (a syntactic
    /// variable or an implicitly quantified variable).
    Var,
    /// A primary symbol of the vocabulary.
    Primary,
}

/// A resolved name occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ref {
    /// Unique identifier. Equal to `external` for variables.
    pub internal: Arc<str>,
    /// Display text.
    pub external: Arc<str>,
    pub kind: RefKind,
    pub arity: GArity,
}

impl Ref {
    pub fn var(name: &str, arity: GArity) -> Ref {
        let n: Arc<str> = Arc::from(name);
        Ref {
            internal: n.clone(),
            external: n,
            kind: RefKind::Var,
            arity,
        }
    }

    pub fn primary(internal: &str, external: &str, arity: GArity) -> Ref {
        Ref {
            internal: Arc::from(internal),
            external: Arc::from(external),
            kind: RefKind::Primary,
            arity,
        }
    }

    pub fn is_var(&self) -> bool {
        self.kind == RefKind::Var
    }

    pub fn style(&self) -> NameStyle {
        NameStyle::of(&self.external)
    }

    /// Mode of a bare occurrence: the single letter of a nullary arity, `T`
    /// for a symbol used as a value (e.g. `+` as a model component).
    pub fn value_mode(&self) -> Mode {
        if self.arity.is_nullary() {
            self.arity.result()
        } else {
            Mode::T
        }
    }

    pub(crate) fn renamed(&self, to: &Arc<str>) -> Ref {
        Ref {
            internal: to.clone(),
            external: to.clone(),
            kind: self.kind,
            arity: self.arity.clone(),
        }
    }
}

/// Whether a simple definition introduces constants (`def[...]`) or
/// variables (`dev[...]`, `(x | P)`). The two share one abstract syntax.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum DefKind {
    Variables,
    Constants,
}

/// A name introduced by a simple definition. `arity` is `T` unless the
/// binder stands for an operation (e.g. the `*` of a group).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: Arc<str>,
    pub arity: GArity,
    /// Optional type: a term (membership) or a definition (model-of). A type
    /// may mention the binders to its left.
    pub ty: Option<Construct>,
}

impl Binder {
    pub fn plain(name: &str) -> Binder {
        Binder {
            name: Arc::from(name),
            arity: GArity::term(),
            ty: None,
        }
    }

    pub fn typed(name: &str, ty: Construct) -> Binder {
        Binder {
            name: Arc::from(name),
            arity: GArity::term(),
            ty: Some(ty),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleDef {
    pub kind: DefKind,
    pub binders: Vec<Binder>,
    pub body: Construct,
}

impl SimpleDef {
    pub fn names(&self) -> Vec<Arc<str>> {
        self.binders.iter().map(|b| b.name.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// A bare name.
    Ref(Ref),
    /// `f(z1, …, zk)`, also infix/prefix/bracketed notations.
    App { head: Ref, args: Vec<Construct> },
    /// `(x1, …, xk | P)`, `dev[…]`, `def[…]`.
    Def(SimpleDef),
    /// `d(z, x)` (term target) or `d(z, p)` (formula target).
    DefApply {
        def: Construct,
        model: Construct,
        target: Construct,
    },
    /// `d(z)`: z is a model of d.
    ModelAssert { def: Construct, model: Construct },
    /// `z.x`.
    Dot {
        model: Construct,
        field: Arc<str>,
        mode: Mode,
    },
    /// `{z1, …, zk}` when no declared `{` symbol applies.
    SetTerm(Vec<Construct>),
    /// `[z1, …, zk]`.
    Tuple(Vec<Construct>),
    /// `[d]`: the names of d as a term.
    BracketDef(Construct),
}

#[derive(PartialEq, Eq, Hash)]
struct Inner {
    node: Node,
    mode: Mode,
}

/// An immutable, cheaply clonable construct.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Construct(Arc<Inner>);

impl fmt::Debug for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::render::render_ascii(self))
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::render::render_ascii(self))
    }
}

fn expect_mode(c: &Construct, m: Mode, what: &str) -> Result<(), Error> {
    if c.mode() == m {
        Ok(())
    } else {
        Err(Error::ModeMismatch {
            expected: m,
            found: c.mode(),
            context: what.to_string(),
        })
    }
}

impl Construct {
    fn mk(node: Node, mode: Mode) -> Construct {
        Construct(Arc::new(Inner { node, mode }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn mode(&self) -> Mode {
        self.0.mode
    }

    pub fn ptr_eq(&self, other: &Construct) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn reference(r: Ref) -> Construct {
        let m = r.value_mode();
        Construct::mk(Node::Ref(r), m)
    }

    pub fn var(name: &str, mode: Mode) -> Construct {
        Construct::reference(Ref::var(name, GArity::single(mode)))
    }

    /// Applies `head` to `args`, checking the argument modes against the
    /// head's arity.
    pub fn app(head: Ref, args: Vec<Construct>) -> Result<Construct, Error> {
        if head.arity.is_nullary() && args.is_empty() {
            return Ok(Construct::reference(head));
        }
        if args.len() != head.arity.arg_count() {
            return Err(Error::ArityMismatch {
                symbol: head.external.to_string(),
                arity: head.arity.clone(),
                found: args.iter().map(|a| a.mode()).collect(),
            });
        }
        for (a, m) in args.iter().zip(head.arity.args()) {
            if a.mode() != *m {
                return Err(Error::ArityMismatch {
                    symbol: head.external.to_string(),
                    arity: head.arity.clone(),
                    found: args.iter().map(|a| a.mode()).collect(),
                });
            }
        }
        let mode = head.arity.result();
        Ok(Construct::mk(Node::App { head, args }, mode))
    }

    pub fn simple_def(def: SimpleDef) -> Result<Construct, Error> {
        let mut seen = BTreeSet::new();
        for b in &def.binders {
            if !seen.insert(b.name.clone()) {
                return Err(Error::DuplicateBinder(b.name.to_string()));
            }
            if let Some(t) = &b.ty {
                if t.mode() == Mode::F {
                    return Err(Error::ModeMismatch {
                        expected: Mode::T,
                        found: Mode::F,
                        context: format!("type of binder {}", b.name),
                    });
                }
            }
        }
        if def.binders.is_empty() {
            return Err(Error::Definition(
                "a definition needs at least one name".into(),
            ));
        }
        expect_mode(&def.body, Mode::F, "defining formula")?;
        Ok(Construct::mk(Node::Def(def), Mode::D))
    }

    pub fn def_apply(
        def: Construct,
        model: Construct,
        target: Construct,
    ) -> Result<Construct, Error> {
        expect_mode(&def, Mode::D, "applied definition")?;
        expect_mode(&model, Mode::T, "model")?;
        let mode = target.mode();
        if mode == Mode::D {
            return Err(Error::ModeMismatch {
                expected: Mode::T,
                found: Mode::D,
                context: "definition application target".into(),
            });
        }
        Ok(Construct::mk(Node::DefApply { def, model, target }, mode))
    }

    pub fn model_assert(def: Construct, model: Construct) -> Result<Construct, Error> {
        expect_mode(&def, Mode::D, "asserted definition")?;
        expect_mode(&model, Mode::T, "model")?;
        Ok(Construct::mk(Node::ModelAssert { def, model }, Mode::F))
    }

    pub fn dot(model: Construct, field: &str, mode: Mode) -> Result<Construct, Error> {
        expect_mode(&model, Mode::T, "dot access")?;
        if mode == Mode::D {
            return Err(Error::ModeMismatch {
                expected: Mode::T,
                found: Mode::D,
                context: format!("field {field}"),
            });
        }
        Ok(Construct::mk(
            Node::Dot {
                model,
                field: Arc::from(field),
                mode,
            },
            mode,
        ))
    }

    pub fn set_term(elems: Vec<Construct>) -> Result<Construct, Error> {
        for e in &elems {
            expect_mode(e, Mode::T, "set element")?;
        }
        Ok(Construct::mk(Node::SetTerm(elems), Mode::T))
    }

    pub fn tuple(elems: Vec<Construct>) -> Result<Construct, Error> {
        for e in &elems {
            expect_mode(e, Mode::T, "tuple element")?;
        }
        Ok(Construct::mk(Node::Tuple(elems), Mode::T))
    }

    pub fn bracket_def(def: Construct) -> Result<Construct, Error> {
        expect_mode(&def, Mode::D, "bracketed definition")?;
        Ok(Construct::mk(Node::BracketDef(def), Mode::T))
    }

    pub fn as_ref(&self) -> Option<&Ref> {
        match self.node() {
            Node::Ref(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<(&Ref, &[Construct])> {
        match self.node() {
            Node::App { head, args } => Some((head, args)),
            _ => None,
        }
    }

    pub fn as_def(&self) -> Option<&SimpleDef> {
        match self.node() {
            Node::Def(d) => Some(d),
            _ => None,
        }
    }

    /// True when this is an application of the primary with the given
    /// internal name.
    pub fn is_app_of(&self, internal: &str) -> bool {
        match self.node() {
            Node::App { head, .. } => head.kind == RefKind::Primary && &*head.internal == internal,
            Node::Ref(r) => r.kind == RefKind::Primary && &*r.internal == internal,
            _ => false,
        }
    }

    /// The direct sub-constructs, in order (binder types before bodies).
    pub fn children(&self) -> Vec<&Construct> {
        match self.node() {
            Node::Ref(_) => vec![],
            Node::App { args, .. } => args.iter().collect(),
            Node::Def(d) => {
                let mut v: Vec<&Construct> =
                    d.binders.iter().filter_map(|b| b.ty.as_ref()).collect();
                v.push(&d.body);
                v
            }
            Node::DefApply { def, model, target } => vec![def, model, target],
            Node::ModelAssert { def, model } => vec![def, model],
            Node::Dot { model, .. } => vec![model],
            Node::SetTerm(e) | Node::Tuple(e) => e.iter().collect(),
            Node::BracketDef(d) => vec![d],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}
