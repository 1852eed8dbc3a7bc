//! Binding structure: which names a definition introduces (its d-names) and
//! which arguments of an application lie in their scope.
//!
//! A simple definition binds its names in its body. An application whose
//! head takes a definition together with other arguments (`A[d, P]`,
//! `d & P`, `{d, f}`, `Rep(d, z, d1)`, …) additionally binds the d-names of
//! that definition in some of the other arguments. The names of a
//! definitional variable are unknown; such a definition binds nothing
//! visible.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::construct::{Construct, Node, Ref, RefKind};
use super::garity::Mode;
use super::vocab::logical;

/// How the arguments of an application are scoped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeRule {
    /// Index of the definition argument whose names are bound.
    pub owner: usize,
    /// Indices of the arguments that see those names.
    pub scoped: Vec<usize>,
}

/// How the d-names of a definition-valued application are formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NameRule {
    /// The names of one argument.
    Of(usize),
    /// `d1 ! d2`: names of d1 followed by names of d2.
    Concat,
    /// `d1 \ d2`: names of d1 followed by all but the first name of d2.
    HConcat,
    /// Unknown (a declared definition symbol without a known elimination).
    Opaque,
}

pub fn scope_rule(head: &Ref) -> Option<ScopeRule> {
    if head.kind == RefKind::Primary {
        match &*head.internal {
            logical::PAND | logical::POR | logical::PIMP => {
                return Some(ScopeRule {
                    owner: 1,
                    scoped: vec![0],
                })
            }
            logical::REP => {
                return Some(ScopeRule {
                    owner: 0,
                    scoped: vec![2],
                })
            }
            logical::CONCAT | logical::HCONCAT | logical::DNOT => return None,
            _ => {}
        }
    }
    let args = head.arity.args();
    if args.len() >= 2 && args[0] == Mode::D {
        Some(ScopeRule {
            owner: 0,
            scoped: (1..args.len()).collect(),
        })
    } else {
        None
    }
}

pub fn name_rule(head: &Ref) -> NameRule {
    if head.kind == RefKind::Primary {
        match &*head.internal {
            logical::DNOT | logical::DAND | logical::DOR | logical::DIMP => return NameRule::Of(0),
            logical::PAND | logical::POR | logical::PIMP => return NameRule::Of(1),
            logical::CONCAT => return NameRule::Concat,
            logical::HCONCAT => return NameRule::HConcat,
            logical::REP => return NameRule::Of(2),
            _ => {}
        }
    }
    NameRule::Opaque
}

/// The d-names of a definition, as far as they are syntactically known.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DNames {
    pub known: Vec<Arc<str>>,
    /// False when some part of the definition is a definitional variable or
    /// an opaque definition symbol; positions are then not meaningful.
    pub complete: bool,
}

impl DNames {
    fn opaque() -> DNames {
        DNames {
            known: vec![],
            complete: false,
        }
    }

    pub fn contains(&self, n: &str) -> bool {
        self.known.iter().any(|k| &**k == n)
    }
}

/// Computes the d-names of a mode-D construct (empty and incomplete for
/// other modes).
pub fn d_names(c: &Construct) -> DNames {
    match c.node() {
        Node::Def(d) => DNames {
            known: d.names(),
            complete: true,
        },
        Node::App { head, args } if c.mode() == Mode::D => match name_rule(head) {
            NameRule::Of(i) => d_names(&args[i]),
            NameRule::Concat => {
                let a = d_names(&args[0]);
                let b = d_names(&args[1]);
                let mut known = a.known;
                known.extend(b.known);
                DNames {
                    known,
                    complete: a.complete && b.complete,
                }
            }
            NameRule::HConcat => {
                let a = d_names(&args[0]);
                let b = d_names(&args[1]);
                let mut known = a.known;
                if b.complete {
                    known.extend(b.known.into_iter().skip(1));
                }
                DNames {
                    known,
                    complete: a.complete && b.complete,
                }
            }
            NameRule::Opaque => DNames::opaque(),
        },
        _ => DNames::opaque(),
    }
}

/// Free variables (not primary symbols) of a construct.
pub fn free_vars(c: &Construct) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    collect(c, &mut Vec::new(), &mut out, false);
    out
}

/// Free names: free variables together with the internal names of the
/// primary symbols that occur.
pub fn free_names(c: &Construct) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    collect(c, &mut Vec::new(), &mut out, true);
    out
}

fn note(r: &Ref, bound: &[Arc<str>], out: &mut BTreeSet<Arc<str>>, primaries: bool) {
    match r.kind {
        RefKind::Var => {
            if !bound.contains(&r.internal) {
                out.insert(r.internal.clone());
            }
        }
        RefKind::Primary => {
            if primaries {
                out.insert(r.internal.clone());
            }
        }
    }
}

fn collect(
    c: &Construct,
    bound: &mut Vec<Arc<str>>,
    out: &mut BTreeSet<Arc<str>>,
    primaries: bool,
) {
    match c.node() {
        Node::Ref(r) => note(r, bound, out, primaries),
        Node::App { head, args } => {
            note(head, bound, out, primaries);
            match scope_rule(head) {
                Some(rule) => {
                    let names = d_names(&args[rule.owner]).known;
                    for (i, a) in args.iter().enumerate() {
                        if rule.scoped.contains(&i) {
                            let n = bound.len();
                            bound.extend(names.iter().cloned());
                            collect(a, bound, out, primaries);
                            bound.truncate(n);
                        } else {
                            collect(a, bound, out, primaries);
                        }
                    }
                }
                None => {
                    for a in args {
                        collect(a, bound, out, primaries);
                    }
                }
            }
        }
        Node::Def(d) => {
            let n = bound.len();
            for b in &d.binders {
                if let Some(t) = &b.ty {
                    collect(t, bound, out, primaries);
                }
                bound.push(b.name.clone());
            }
            collect(&d.body, bound, out, primaries);
            bound.truncate(n);
        }
        Node::DefApply { def, model, target } => {
            collect(def, bound, out, primaries);
            collect(model, bound, out, primaries);
            let names = d_names(def).known;
            let n = bound.len();
            bound.extend(names);
            collect(target, bound, out, primaries);
            bound.truncate(n);
        }
        Node::ModelAssert { def, model } => {
            collect(def, bound, out, primaries);
            collect(model, bound, out, primaries);
        }
        Node::Dot { model, .. } => collect(model, bound, out, primaries),
        Node::SetTerm(e) | Node::Tuple(e) => {
            for x in e {
                collect(x, bound, out, primaries);
            }
        }
        Node::BracketDef(d) => {
            collect(d, bound, out, primaries);
            for n in d_names(d).known {
                if !bound.contains(&n) {
                    out.insert(n);
                }
            }
        }
    }
}

/// True iff none of `names` occurs free in `p`.
pub fn is_d_free(p: &Construct, names: &[Arc<str>]) -> bool {
    let fv = free_vars(p);
    names.iter().all(|n| !fv.contains(n))
}

/// Every variable name occurring anywhere (bound or free).
pub fn all_var_names(c: &Construct, out: &mut BTreeSet<Arc<str>>) {
    match c.node() {
        Node::Ref(r) if r.kind == RefKind::Var => {
            out.insert(r.internal.clone());
        }
        Node::App { head, .. } if head.kind == RefKind::Var => {
            out.insert(head.internal.clone());
        }
        Node::Def(d) => {
            for b in &d.binders {
                out.insert(b.name.clone());
            }
        }
        _ => {}
    }
    for ch in c.children() {
        all_var_names(ch, out);
    }
}

/// The d-names of a definition together with their arities, as far as known.
pub fn d_name_arities(c: &Construct) -> Vec<(Arc<str>, super::garity::GArity)> {
    let names = d_names(c).known;
    let binders = all_binder_arities(c);
    names
        .into_iter()
        .map(|n| {
            let ar = binders
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, a)| a.clone())
                .unwrap_or_else(super::garity::GArity::term);
            (n, ar)
        })
        .collect()
}

/// Every binder occurring in `c` with its arity.
pub fn all_binder_arities(c: &Construct) -> Vec<(Arc<str>, super::garity::GArity)> {
    let mut out = Vec::new();
    binder_arities(c, &mut out);
    out
}

fn binder_arities(c: &Construct, out: &mut Vec<(Arc<str>, super::garity::GArity)>) {
    if let Node::Def(d) = c.node() {
        for b in &d.binders {
            out.push((b.name.clone(), b.arity.clone()));
        }
    }
    for ch in c.children() {
        binder_arities(ch, out);
    }
}
