//! Operations on definitions: lifted connectives, concatenation,
//! substitution of models, elimination of composite definitions and the
//! definitional normal form used by `unfold`.
//!
//! Definitions that are not simple and cannot be eliminated (definitional
//! variables, opaque definition symbols) have no visible names. A formula
//! evaluated in such a definition therefore does not mention its names, so
//! `d(P, z)` is `P`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::syntax::scope::{d_names, free_vars, scope_rule, DNames};
use crate::syntax::subst::{fresh_name, rename_def_names};
use crate::syntax::{
    logical, substitute, Binder, Construct, DefKind, GArity, Mode, Node, Ref, RefKind, SimpleDef,
    Subst,
};

/// Internal name of the built-in test "typed definition whose types are sets".
pub const TYPED_SET_DEF: &str = "TypedSetDef";
/// Internal name of the built-in test "definition of the form `y | E[x:A & P(x, y)]`
/// with P functional".
pub const REP_AX_DEF: &str = "RepAxDef";
/// Internal name of membership, used to normalize typed binders.
pub const MEMBER: &str = "∈";

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Connective {
    Not,
    And,
    Or,
    Imp,
}

impl Connective {
    fn formula_symbol(self) -> &'static str {
        match self {
            Connective::Not => logical::NOT,
            Connective::And => logical::AND,
            Connective::Or => logical::OR,
            Connective::Imp => logical::IMP,
        }
    }
}

fn ar(s: &str) -> GArity {
    s.parse().expect("builtin arity")
}

fn logical_ref(internal: &str) -> Ref {
    let (_, ext, a) = logical::TABLE
        .iter()
        .find(|(i, _, _)| *i == internal)
        .expect("logical symbol");
    Ref::primary(internal, ext, ar(a))
}

/// Applies a logical symbol (by internal name).
pub fn logical_app(internal: &str, args: Vec<Construct>) -> Result<Construct, Error> {
    Construct::app(logical_ref(internal), args)
}

pub fn truth() -> Construct {
    Construct::reference(logical_ref(logical::TRUE))
}

pub fn falsity() -> Construct {
    Construct::reference(logical_ref(logical::FALSE))
}

pub fn not(p: Construct) -> Construct {
    Construct::app(logical_ref(logical::NOT), vec![p]).expect("formula")
}

/// `p op q` for a binary propositional connective (internal name).
/// A conjunction with `true` is its other operand.
pub fn binary(op: &str, p: Construct, q: Construct) -> Construct {
    if op == logical::AND {
        if p.is_app_of(logical::TRUE) {
            return q;
        }
        if q.is_app_of(logical::TRUE) {
            return p;
        }
    }
    Construct::app(logical_ref(op), vec![p, q]).expect("formulas")
}

pub fn and(p: Construct, q: Construct) -> Construct {
    binary(logical::AND, p, q)
}

pub fn imp(p: Construct, q: Construct) -> Construct {
    binary(logical::IMP, p, q)
}

pub fn iff(p: Construct, q: Construct) -> Construct {
    binary(logical::IFF, p, q)
}

fn def_err(msg: impl Into<String>) -> Error {
    Error::Definition(msg.into())
}

fn simple(d: &Construct) -> Result<&SimpleDef, Error> {
    d.as_def()
        .ok_or_else(|| def_err(format!("{d} is not a simple definition")))
}

fn make(kind: DefKind, binders: Vec<Binder>, body: Construct) -> Result<Construct, Error> {
    Construct::simple_def(SimpleDef {
        kind,
        binders,
        body,
    })
}

/// `~d`, `d & r`, `d ∨ r`, `d → r` for a simple definition.
pub fn lift_connective(
    op: Connective,
    d: &Construct,
    r: Option<&Construct>,
) -> Result<Construct, Error> {
    let sd = simple(d)?;
    let body = match (op, r) {
        (Connective::Not, None) => not(sd.body.clone()),
        (Connective::Not, Some(_)) => {
            return Err(def_err("negation of a definition takes no formula"))
        }
        (_, None) => return Err(def_err("a lifted binary connective needs a formula")),
        (_, Some(r)) => {
            if r.mode() != Mode::F {
                return Err(Error::ModeMismatch {
                    expected: Mode::F,
                    found: r.mode(),
                    context: "right operand of a lifted connective".into(),
                });
            }
            binary(op.formula_symbol(), sd.body.clone(), r.clone())
        }
    };
    make(sd.kind, sd.binders.clone(), body)
}

/// `r op d` with the formula on the left.
fn lift_left(op: Connective, r: &Construct, d: &Construct) -> Result<Construct, Error> {
    let sd = simple(d)?;
    let body = binary(op.formula_symbol(), r.clone(), sd.body.clone());
    make(sd.kind, sd.binders.clone(), body)
}

fn captured(p: &Construct, names: &[Arc<str>]) -> Option<Arc<str>> {
    let fv = free_vars(p);
    names.iter().find(|n| fv.contains(*n)).cloned()
}

/// `d1 ! d2`: the names of both, the conjunction of both bodies. The body of
/// `d2` may mention the names of `d1`.
pub fn concat(d1: &Construct, d2: &Construct) -> Result<Construct, Error> {
    let a = simple(d1)?;
    let b = simple(d2)?;
    for x in &b.binders {
        if a.binders.iter().any(|y| y.name == x.name) {
            return Err(Error::DuplicateBinder(x.name.to_string()));
        }
    }
    if let Some(n) = captured(&a.body, &b.names()) {
        return Err(def_err(format!(
            "{n} is free in the first definition and named by the second"
        )));
    }
    let mut binders = a.binders.clone();
    binders.extend(b.binders.iter().cloned());
    make(a.kind, binders, and(a.body.clone(), b.body.clone()))
}

/// `d1 \ d2`: the first name of `d2` is identified with the first name of
/// `d1`.
pub fn hconcat(d1: &Construct, d2: &Construct) -> Result<Construct, Error> {
    let a = simple(d1)?;
    let b = simple(d2)?;
    let x1 = &a.binders[0];
    let y1 = &b.binders[0];
    if y1.arity != x1.arity {
        return Err(def_err(format!(
            "cannot identify {} of arity {} with {} of arity {}",
            y1.name, y1.arity, x1.name, x1.arity
        )));
    }
    let tail = &b.binders[1..];
    for y in tail {
        if a.binders.iter().any(|x| x.name == y.name) {
            return Err(Error::DuplicateBinder(y.name.to_string()));
        }
    }
    let tail_names: Vec<Arc<str>> = tail.iter().map(|b| b.name.clone()).collect();
    if let Some(n) = captured(&a.body, &tail_names) {
        return Err(def_err(format!(
            "{n} is free in the first definition and named by the second"
        )));
    }
    // the type of the merged name becomes a conjunct
    let mut q = b.body.clone();
    if let Some(c) = type_conjunct(y1) {
        q = and(c, q);
    }
    let by = Construct::reference(Ref::var(&x1.name, x1.arity.clone()));
    let (tail, q) = if tail.is_empty() {
        (vec![], subst1(&q, &y1.name, &by)?)
    } else {
        let t = make(b.kind, tail.to_vec(), q)?;
        let t = subst1(&t, &y1.name, &by)?;
        let sd = t.as_def().expect("still a definition");
        (sd.binders.clone(), sd.body.clone())
    };
    let mut binders = a.binders.clone();
    binders.extend(tail);
    make(a.kind, binders, and(a.body.clone(), q))
}

fn subst1(c: &Construct, name: &str, by: &Construct) -> Result<Construct, Error> {
    let mut s = Subst::new();
    s.insert(Arc::from(name), by.clone());
    substitute(c, &s)
}

fn name_subst(d: &Construct, names: &[Arc<str>], z: &[Construct]) -> Result<Subst, Error> {
    if names.len() != z.len() {
        return Err(def_err(format!(
            "{} has {} names but the model has {} components",
            d,
            names.len(),
            z.len()
        )));
    }
    let arities = crate::syntax::scope::d_name_arities(d);
    let mut s = Subst::new();
    for (i, (n, v)) in names.iter().zip(z).enumerate() {
        let a = &arities[i].1;
        if a.is_nullary() && v.mode() != a.result() {
            return Err(Error::ModeMismatch {
                expected: a.result(),
                found: v.mode(),
                context: format!("model component for {n}"),
            });
        }
        s.insert(n.clone(), v.clone());
    }
    Ok(s)
}

fn known_names(d: &Construct) -> Result<Vec<Arc<str>>, Error> {
    let n = d_names(d);
    if !n.complete {
        return Err(def_err(format!("the names of {d} are not known")));
    }
    Ok(n.known)
}

/// `Rep(d, z, d1)`: the components of `z` substituted for the names of `d`
/// in `d1`.
pub fn rep_subst(d: &Construct, z: &[Construct], d1: &Construct) -> Result<Construct, Error> {
    if d1.mode() != Mode::D {
        return Err(Error::ModeMismatch {
            expected: Mode::D,
            found: d1.mode(),
            context: "Rep target".into(),
        });
    }
    let names = known_names(d)?;
    let s = name_subst(d, &names, z)?;
    substitute(d1, &s)
}

/// Replaces the free names `cs` (constants of a theory) by `zs`.
pub fn subst_constants(
    a: &Construct,
    cs: &[Arc<str>],
    zs: &[Construct],
) -> Result<Construct, Error> {
    if cs.len() != zs.len() {
        return Err(def_err(format!(
            "{} constants but {} replacements",
            cs.len(),
            zs.len()
        )));
    }
    let mut s = Subst::new();
    for (c, z) in cs.iter().zip(zs) {
        if z.mode() != Mode::T {
            return Err(Error::ModeMismatch {
                expected: Mode::T,
                found: z.mode(),
                context: format!("replacement for constant {c}"),
            });
        }
        if let Some(m) = free_mode(a, c) {
            if m != Mode::T {
                return Err(def_err(format!("{c} is not a constant (it has mode {m})")));
            }
        }
        s.insert(c.clone(), z.clone());
    }
    substitute(a, &s)
}

/// The mode of a free variable occurrence (heads of applications count as T).
pub fn free_mode(c: &Construct, name: &str) -> Option<Mode> {
    if !free_vars(c).contains(name) {
        return None;
    }
    fn find(c: &Construct, name: &str) -> Option<Mode> {
        match c.node() {
            Node::Ref(r) if r.is_var() && &*r.internal == name => Some(r.value_mode()),
            Node::App { head, .. } if head.is_var() && &*head.internal == name => Some(Mode::T),
            _ => c.children().into_iter().find_map(|ch| find(ch, name)),
        }
    }
    find(c, name)
}

/// The components of a model for a definition with `k` names: the model
/// itself when `k = 1`, the elements of a `k`-tuple otherwise.
pub fn model_components(z: &Construct, k: usize) -> Option<Vec<Construct>> {
    if k == 1 {
        return Some(vec![z.clone()]);
    }
    match z.node() {
        Node::Tuple(e) if e.len() == k => Some(e.clone()),
        _ => None,
    }
}

fn is_definition_symbol(head: &Ref) -> bool {
    head.kind == RefKind::Primary
        && matches!(
            &*head.internal,
            logical::DNOT
                | logical::DAND
                | logical::DOR
                | logical::DIMP
                | logical::PAND
                | logical::POR
                | logical::PIMP
                | logical::CONCAT
                | logical::HCONCAT
                | logical::REP
        )
}

/// Renames free occurrences of the old d-names in a scoped argument after
/// the owning definition's names changed.
fn retarget(scoped: &Construct, old: &DNames, new_owner: &Construct) -> Result<Construct, Error> {
    let new = d_names(new_owner);
    if old.known == new.known
        || !old.complete
        || !new.complete
        || old.known.len() != new.known.len()
    {
        return Ok(scoped.clone());
    }
    let arities = crate::syntax::scope::d_name_arities(new_owner);
    let mut s = Subst::new();
    for (i, (o, n)) in old.known.iter().zip(&new.known).enumerate() {
        if o != n {
            s.insert(
                o.clone(),
                Construct::reference(Ref::var(n, arities[i].1.clone())),
            );
        }
    }
    substitute(scoped, &s)
}

/// Converts a composite definition into a simple one. Composite definitions
/// nested inside the result are eliminated where possible.
pub fn eliminate_composite(c: &Construct) -> Result<Construct, Error> {
    let top = elim(c)?;
    Ok(deep(&top, &mut |x| elim(x).ok()))
}

/// Top-level elimination.
fn elim(c: &Construct) -> Result<Construct, Error> {
    if c.mode() != Mode::D {
        return Err(Error::ModeMismatch {
            expected: Mode::D,
            found: c.mode(),
            context: "definition elimination".into(),
        });
    }
    match c.node() {
        Node::Def(_) => Ok(c.clone()),
        Node::App { head, args } if is_definition_symbol(head) => {
            let lifted = |i: usize| -> Result<(Construct, Construct), Error> {
                let owner = elim(&args[i])?;
                let other = retarget(&args[1 - i], &d_names(&args[i]), &owner)?;
                Ok((owner, other))
            };
            match &*head.internal {
                logical::DNOT => lift_connective(Connective::Not, &elim(&args[0])?, None),
                logical::DAND | logical::DOR | logical::DIMP => {
                    let op = connective_of(&head.internal);
                    let (d, r) = lifted(0)?;
                    lift_connective(op, &d, Some(&r))
                }
                logical::PAND | logical::POR | logical::PIMP => {
                    let op = connective_of(&head.internal);
                    let (d, r) = lifted(1)?;
                    lift_left(op, &r, &d)
                }
                logical::CONCAT => concat(&elim(&args[0])?, &elim(&args[1])?),
                logical::HCONCAT => hconcat(&elim(&args[0])?, &elim(&args[1])?),
                logical::REP => {
                    let (d, z, d1) = (&args[0], &args[1], &args[2]);
                    let names = d_names(d);
                    if names.known.iter().all(|n| !free_vars(d1).contains(n)) {
                        return elim(d1);
                    }
                    let names = known_names(d)?;
                    let comps = model_components(z, names.len()).ok_or_else(|| {
                        def_err(format!(
                            "{z} is not a model with {} components",
                            names.len()
                        ))
                    })?;
                    let r = rep_subst(d, &comps, d1)?;
                    elim(&r)
                }
                _ => unreachable!("definition symbol"),
            }
        }
        _ => Err(def_err(format!(
            "{c} cannot be converted into a simple definition"
        ))),
    }
}

fn connective_of(internal: &str) -> Connective {
    match internal {
        logical::DNOT => Connective::Not,
        logical::DAND | logical::PAND => Connective::And,
        logical::DOR | logical::POR => Connective::Or,
        _ => Connective::Imp,
    }
}

/// Rebuilds `c` bottom-up, replacing each mode-D subconstruct for which `f`
/// returns a value. Arguments scoped by a definition follow renamings of its
/// names.
fn deep(c: &Construct, f: &mut dyn FnMut(&Construct) -> Option<Construct>) -> Construct {
    let rebuilt = map_children(c, &mut |x| deep(x, f));
    if rebuilt.mode() == Mode::D && !matches!(rebuilt.node(), Node::Def(_)) {
        if let Some(r) = f(&rebuilt) {
            return r;
        }
    }
    rebuilt
}

/// Applies `g` to every immediate child; falls back to `c` if the result
/// would be ill-formed.
fn map_children(c: &Construct, g: &mut dyn FnMut(&Construct) -> Construct) -> Construct {
    let r: Result<Construct, Error> = (|| match c.node() {
        Node::Ref(_) => Ok(c.clone()),
        Node::App { head, args } => {
            let mut out: Vec<Construct> = args.iter().map(&mut *g).collect();
            if let Some(rule) = scope_rule(head) {
                let old = d_names(&args[rule.owner]);
                for &j in &rule.scoped {
                    out[j] = retarget(&out[j], &old, &out[rule.owner])?;
                }
            }
            Construct::app(head.clone(), out)
        }
        Node::Def(d) => {
            let binders = d
                .binders
                .iter()
                .map(|b| Binder {
                    name: b.name.clone(),
                    arity: b.arity.clone(),
                    ty: b.ty.as_ref().map(&mut *g),
                })
                .collect();
            make(d.kind, binders, g(&d.body))
        }
        Node::DefApply { def, model, target } => {
            let d2 = g(def);
            let t2 = retarget(&g(target), &d_names(def), &d2)?;
            Construct::def_apply(d2, g(model), t2)
        }
        Node::ModelAssert { def, model } => Construct::model_assert(g(def), g(model)),
        Node::Dot { model, field, mode } => Construct::dot(g(model), field, *mode),
        Node::SetTerm(e) => Construct::set_term(e.iter().map(&mut *g).collect()),
        Node::Tuple(e) => Construct::tuple(e.iter().map(&mut *g).collect()),
        Node::BracketDef(d) => Construct::bracket_def(g(d)),
    })();
    r.unwrap_or_else(|_| c.clone())
}

fn member_ref() -> Ref {
    Ref::primary(MEMBER, MEMBER, ar("TTF"))
}

/// The conjunct a typed binder stands for: `x ∈ t`, or `t(x)` for a
/// definition type.
fn type_conjunct(b: &Binder) -> Option<Construct> {
    let t = b.ty.as_ref()?;
    let x = Construct::reference(Ref::var(&b.name, b.arity.clone()));
    Some(if t.mode() == Mode::D {
        Construct::model_assert(t.clone(), x).expect("definition type")
    } else {
        Construct::app(member_ref(), vec![x, t.clone()]).expect("term type")
    })
}

/// `(x1:t1, …, xk:tk | P)` as `(x1, …, xk | x1 ∈ t1 & … & xk ∈ tk & P)`.
/// A name that occurs free in a type is renamed first so it is not captured
/// when the type moves into the body.
pub fn normalize_types(d: &Construct) -> Result<Construct, Error> {
    let sd = simple(d)?;
    if sd.binders.iter().all(|b| b.ty.is_none()) {
        return Ok(d.clone());
    }
    let mut type_fv = std::collections::BTreeSet::new();
    let mut clash = BTreeMap::new();
    let mut avoid = std::collections::BTreeSet::new();
    crate::syntax::scope::all_var_names(d, &mut avoid);
    for b in &sd.binders {
        if let Some(t) = &b.ty {
            type_fv.extend(free_vars(t));
        }
        if type_fv.contains(&b.name) {
            let n = fresh_name(&b.name, &avoid);
            avoid.insert(n.clone());
            clash.insert(b.name.clone(), n);
        }
    }
    let d = if clash.is_empty() {
        d.clone()
    } else {
        rename_def_names(d, &clash)?
    };
    let sd = simple(&d)?;
    let mut conj: Option<Construct> = None;
    for b in &sd.binders {
        if let Some(c) = type_conjunct(b) {
            conj = Some(match conj {
                None => c,
                Some(acc) => and(acc, c),
            });
        }
    }
    let body = match conj {
        Some(c) => and(c, sd.body.clone()),
        None => sd.body.clone(),
    };
    let binders = sd
        .binders
        .iter()
        .map(|b| Binder {
            name: b.name.clone(),
            arity: b.arity.clone(),
            ty: None,
        })
        .collect();
    make(sd.kind, binders, body)
}

fn apply_def(
    d: &Construct,
    z: &Construct,
    target: &Construct,
    mode: Mode,
) -> Result<Construct, Error> {
    if d.mode() != Mode::D {
        return Err(Error::ModeMismatch {
            expected: Mode::D,
            found: d.mode(),
            context: "applied definition".into(),
        });
    }
    if target.mode() != mode {
        return Err(Error::ModeMismatch {
            expected: mode,
            found: target.mode(),
            context: "definition application target".into(),
        });
    }
    let names = d_names(d);
    let fv = free_vars(target);
    if names.known.iter().all(|n| !fv.contains(n)) {
        return Ok(target.clone());
    }
    let names = known_names(d)?;
    let comps = model_components(z, names.len()).ok_or_else(|| {
        def_err(format!(
            "{z} is not a model with {} components",
            names.len()
        ))
    })?;
    let s = name_subst(d, &names, &comps)?;
    substitute(target, &s)
}

/// `d(z, x)`: the value of the term `x` in the model `z`.
pub fn apply_def_to_term(d: &Construct, z: &Construct, x: &Construct) -> Result<Construct, Error> {
    apply_def(d, z, x, Mode::T)
}

/// `d(p, z)`: the value of the formula `p` in the model `z`.
pub fn apply_def_to_formula(
    d: &Construct,
    z: &Construct,
    p: &Construct,
) -> Result<Construct, Error> {
    apply_def(d, z, p, Mode::F)
}

/// `d(z)` for an eliminable definition: its defining formula at `z`.
pub fn unfold_model(d: &Construct, z: &Construct) -> Result<Construct, Error> {
    let sd_c = normalize_types(&elim(d)?)?;
    let sd = simple(&sd_c)?;
    let names = sd.names();
    let comps = model_components(z, names.len()).ok_or_else(|| {
        def_err(format!(
            "{z} is not a model with {} components",
            names.len()
        ))
    })?;
    let s = name_subst(&sd_c, &names, &comps)?;
    substitute(&sd.body, &s)
}

/// Whether a definition is typed and all its types are terms.
pub fn typed_set_def(d: &Construct) -> bool {
    match elim(d) {
        Ok(e) => {
            let sd = e.as_def().expect("simple");
            sd.binders
                .iter()
                .all(|b| b.ty.as_ref().is_some_and(|t| t.mode() == Mode::T))
        }
        Err(_) => false,
    }
}

fn conjuncts(p: &Construct, out: &mut Vec<Construct>) {
    if let Some((h, a)) = p.as_app() {
        if h.kind == RefKind::Primary && &*h.internal == logical::AND {
            conjuncts(&a[0], out);
            conjuncts(&a[1], out);
            return;
        }
    }
    out.push(p.clone());
}

/// Whether some conjunct has the form `y = t` or `t = y` with `y` not free in `t`.
fn defines(y: &str, parts: &[Construct]) -> bool {
    parts.iter().any(|p| match p.as_app() {
        Some((h, a)) if h.kind == RefKind::Primary && &*h.internal == logical::EQ => {
            let is_y = |c: &Construct| c.as_ref().is_some_and(|r| r.is_var() && &*r.internal == y);
            (is_y(&a[0]) && !free_vars(&a[1]).contains(y))
                || (is_y(&a[1]) && !free_vars(&a[0]).contains(y))
        }
        _ => false,
    })
}

/// Whether a definition has the form `y | E[x:A & P]` where some conjunct
/// of P is `y = t` (a functional condition on A). The bounded form
/// `y | E[x:A, P]` is accepted as well.
pub fn rep_ax_def(d: &Construct) -> bool {
    let Ok(e) = elim(d) else { return false };
    let sd = e.as_def().expect("simple");
    if sd.binders.len() != 1 || sd.binders[0].arity != GArity::term() {
        return false;
    }
    let y = &*sd.binders[0].name;
    let Some((h, args)) = sd.body.as_app() else {
        return false;
    };
    if h.kind != RefKind::Primary {
        return false;
    }
    let (inner, extra) = match &*h.internal {
        logical::EX => (&args[0], None),
        logical::EX_BOUNDED => (&args[0], Some(&args[1])),
        _ => return false,
    };
    let Ok(ie) = elim(inner) else { return false };
    let isd = ie.as_def().expect("simple");
    if isd.binders.len() != 1 {
        return false;
    }
    let x = &isd.binders[0];
    let Some(t) = &x.ty else { return false };
    if t.mode() != Mode::T || free_vars(t).contains(y) || &*x.name == y {
        return false;
    }
    let mut parts = Vec::new();
    conjuncts(&isd.body, &mut parts);
    if let Some(p) = extra {
        let p = retarget(p, &d_names(inner), &ie).unwrap_or_else(|_| p.clone());
        conjuncts(&p, &mut parts);
    }
    defines(y, &parts)
}

fn builtin(c: &Construct) -> Option<bool> {
    let (h, args) = c.as_app()?;
    if h.kind != RefKind::Primary || h.arity != ar("DF") {
        return None;
    }
    let test: fn(&Construct) -> bool = match &*h.internal {
        TYPED_SET_DEF => typed_set_def,
        REP_AX_DEF => rep_ax_def,
        _ => return None,
    };
    elim(&args[0]).ok()?;
    Some(test(&args[0]))
}

/// The definitional normal form: composite definitions eliminated, typed
/// binders normalized, model assertions, definition applications, `Rep`
/// and `[d]` evaluated where the definition's names are known, and the
/// built-in tests decided on concrete definitions. Two formulas with
/// alpha-equal normal forms are equal by definition.
pub fn normal_form(c: &Construct) -> Construct {
    Nf { keep_opaque: false }.go(c)
}

/// The normal form without the identity `d(P, z) = P` for definitions whose
/// names are not known: such applications stay atomic. Tautology checks use
/// this form, the identity itself is a step of its own.
pub fn structural_normal_form(c: &Construct) -> Construct {
    Nf { keep_opaque: true }.go(c)
}

/// The definition whose names a lifted connective keeps: `d` for `~d`,
/// `d & P`, `P & d` and so on.
fn name_owner(d: &Construct) -> &Construct {
    match d.as_app() {
        Some((h, args)) if h.kind == RefKind::Primary => match &*h.internal {
            logical::DNOT | logical::DAND | logical::DOR | logical::DIMP => name_owner(&args[0]),
            logical::PAND | logical::POR | logical::PIMP => name_owner(&args[1]),
            _ => d,
        },
        _ => d,
    }
}

struct Nf {
    keep_opaque: bool,
}

impl Nf {
    /// `d(P, z)` for a definition with unknown names: distributed over the
    /// propositional connectives of `P`, atomic below them.
    fn opaque_apply(&self, d: &Construct, z: &Construct, p: &Construct) -> Construct {
        if let Some((h, args)) = p.as_app() {
            if h.kind == RefKind::Primary
                && logical::is_propositional(&h.internal)
                && p.mode() == Mode::F
            {
                let args = args.iter().map(|a| self.opaque_apply(d, z, a)).collect();
                return Construct::app(h.clone(), args).expect("same arity");
            }
        }
        if free_vars(p).is_empty() {
            return self.go(p);
        }
        Construct::def_apply(self.go(name_owner(d)), self.go(z), self.go(p)).expect("formula")
    }

    fn go(&self, c: &Construct) -> Construct {
        match c.node() {
            Node::Ref(_) => c.clone(),
            Node::App { head, args } => {
                if let Some(b) = builtin(c) {
                    return if b { truth() } else { falsity() };
                }
                if c.mode() == Mode::D && is_definition_symbol(head) {
                    if let Ok(e) = elim(c) {
                        return self.go(&e);
                    }
                }
                let _ = args;
                let r = map_children(c, &mut |x: &Construct| self.go(x));
                match r.as_app() {
                    Some((h, a)) if h.kind == RefKind::Primary && &*h.internal == logical::AND => {
                        binary(logical::AND, a[0].clone(), a[1].clone())
                    }
                    _ => r,
                }
            }
            Node::Def(_) => {
                let n = normalize_types(c).unwrap_or_else(|_| c.clone());
                map_children(&n, &mut |x: &Construct| self.go(x))
            }
            Node::ModelAssert { def, model } => self.model(def, model),
            Node::DefApply { def, model, target } => {
                if self.keep_opaque
                    && !d_names(def).complete
                    && elim(def).is_err()
                    && !free_vars(target).is_empty()
                {
                    return self.opaque_apply(def, model, target);
                }
                match apply_def(def, model, target, target.mode()) {
                    Ok(r) => self.go(&r),
                    Err(_) => map_children(c, &mut |x: &Construct| self.go(x)),
                }
            }
            Node::BracketDef(d) => {
                if d_names(d).complete {
                    if let Ok(e) = crate::syntax::subst::expand_bracket(d) {
                        return e;
                    }
                }
                map_children(c, &mut |x: &Construct| self.go(x))
            }
            _ => map_children(c, &mut |x: &Construct| self.go(x)),
        }
    }

    fn model(&self, d: &Construct, z: &Construct) -> Construct {
        let z = self.go(z);
        if let Some((h, args)) = d.as_app() {
            if h.kind == RefKind::Primary {
                let ma =
                    |d: &Construct| Construct::model_assert(d.clone(), z.clone()).expect("model");
                let da = |d: &Construct, p: &Construct| {
                    Construct::def_apply(d.clone(), z.clone(), p.clone()).expect("formula")
                };
                let dist = match &*h.internal {
                    logical::DNOT => Some(not(self.go(&ma(&args[0])))),
                    logical::DAND | logical::DOR | logical::DIMP => {
                        let op = connective_of(&h.internal).formula_symbol();
                        Some(binary(
                            op,
                            self.go(&ma(&args[0])),
                            self.go(&da(&args[0], &args[1])),
                        ))
                    }
                    logical::PAND | logical::POR | logical::PIMP => {
                        let op = connective_of(&h.internal).formula_symbol();
                        Some(binary(
                            op,
                            self.go(&da(&args[1], &args[0])),
                            self.go(&ma(&args[1])),
                        ))
                    }
                    _ => None,
                };
                if let Some(r) = dist {
                    return r;
                }
            }
        }
        let d2 = self.go(d);
        if let Some(sd) = d2.as_def() {
            if let Some(comps) = model_components(&z, sd.binders.len()) {
                if let Ok(s) = name_subst(&d2, &sd.names(), &comps) {
                    if let Ok(r) = substitute(&sd.body, &s) {
                        return self.go(&r);
                    }
                }
            }
        }
        Construct::model_assert(d2, z).expect("model")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_construct, render_ascii, Context};
    use crate::syntax::alpha_eq;

    fn ctx() -> Context {
        let mut ctx = Context::logical();
        for d in crate::parser::parse_declarations(
            "def[∈ : \"TTF\"]; A, B, R, t, u : T; P, Q : F; d : D;",
            &ctx,
        )
        .unwrap()
        {
            ctx.apply(&d).unwrap();
        }
        ctx
    }

    fn p(s: &str) -> Construct {
        parse_construct(s, &ctx(), None).unwrap()
    }

    #[test]
    fn negation_and_conjunction() {
        let d = p("(x | x in A)");
        let n = lift_connective(Connective::Not, &d, None).unwrap();
        assert_eq!(render_ascii(&n), "(x | ~(x in A))");
        let c = lift_connective(Connective::And, &d, Some(&p("P"))).unwrap();
        assert_eq!(render_ascii(&c), "(x | x in A & P)");
        assert!(lift_connective(Connective::And, &d, Some(&p("A"))).is_err());
    }

    #[test]
    fn concatenations() {
        let c = concat(&p("(x | P)"), &p("(y | Q)")).unwrap();
        assert_eq!(render_ascii(&c), "(x, y | P & Q)");
        assert!(matches!(
            concat(&p("(x | P)"), &p("(x | Q)")),
            Err(Error::DuplicateBinder(_))
        ));
        let h = hconcat(&p("(x, u | x in A)"), &p("(y, v | y in v)")).unwrap();
        assert_eq!(render_ascii(&h), "(x, u, v | x in A & x in v)");
        assert!(!free_vars(&h).contains("y"));
    }

    #[test]
    fn eliminate_nested() {
        let c = p("~((x | x in A) & P)");
        let e = eliminate_composite(&c).unwrap();
        assert_eq!(render_ascii(&e), "(x | ~(x in A & P))");
        assert!(alpha_eq(&eliminate_composite(&e).unwrap(), &e));
        assert!(eliminate_composite(&p("d & P")).is_err());
    }

    #[test]
    fn model_unfolding() {
        let r = unfold_model(&p("(x | x in A)"), &p("t")).unwrap();
        assert_eq!(render_ascii(&r), "t in A");
        let r = unfold_model(&p("(x:A | x in B)"), &p("t")).unwrap();
        assert_eq!(render_ascii(&r), "t in A & t in B");
        let r = unfold_model(&p("(x, y | x in y)"), &p("[t, u]")).unwrap();
        assert_eq!(render_ascii(&r), "t in u");
        assert!(unfold_model(&p("(x, y | x in y)"), &p("t")).is_err());
    }

    #[test]
    fn applications() {
        let d = p("(x | x in A)");
        let r = apply_def_to_formula(&d, &p("t"), &p("x in B")).unwrap();
        assert_eq!(render_ascii(&r), "t in B");
        assert!(alpha_eq(
            &apply_def_to_formula(&d, &p("t"), &p("P")).unwrap(),
            &p("P")
        ));
        assert!(alpha_eq(
            &apply_def_to_term(&d, &p("t"), &p("x")).unwrap(),
            &p("t")
        ));
    }

    #[test]
    fn constants() {
        let r = subst_constants(
            &p("A in B"),
            &[Arc::from("A"), Arc::from("B")],
            &[p("t"), p("u")],
        )
        .unwrap();
        assert_eq!(render_ascii(&r), "t in u");
        let r = subst_constants(&p("A[x | x in A]"), &[Arc::from("A")], &[p("x")]).unwrap();
        assert_eq!(render_ascii(&r), "A[x1 | x1 in x]");
        assert!(subst_constants(&p("P"), &[Arc::from("P")], &[p("t")]).is_err());
    }

    #[test]
    fn normal_form_distributes_over_opaque_definitions() {
        let a = normal_form(&p("(d -> P)(t)"));
        assert!(alpha_eq(&a, &p("d(t) -> P")));
        let b = normal_form(&p("d(P, t)"));
        assert!(alpha_eq(&b, &p("P")));
        let c = normal_form(&p("(~d)(t)"));
        assert!(alpha_eq(&c, &p("~d(t)")));
    }

    #[test]
    fn builtins() {
        assert!(typed_set_def(&p("(x:A | x in B)")));
        assert!(typed_set_def(&p("x:A & x in B")));
        assert!(!typed_set_def(&p("(x | x in B)")));
        assert!(rep_ax_def(&p("(y | E[x:A & y = x])")));
        assert!(rep_ax_def(&p("(y | E[x:A, y = t & x in y])")));
        assert!(!rep_ax_def(&p("(y | E[x:A & y in x])")));
        assert!(!rep_ax_def(&p("(y | E[x:y & y = x])")));
    }
}
