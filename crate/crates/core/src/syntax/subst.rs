//! Capture-avoiding simultaneous substitution of constructs for free
//! variables, and alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::construct::{Binder, Construct, Node, Ref, RefKind, SimpleDef};
use super::garity::Mode;
use super::scope::{
    all_binder_arities, all_var_names, d_names, free_vars, name_rule, scope_rule, NameRule,
};
use crate::error::Error;

/// A simultaneous substitution: variable name to replacement.
pub type Subst = BTreeMap<Arc<str>, Construct>;

/// Picks a name not in `avoid` by suffixing the least unused numeral
/// (operators get `#` marks instead, as a numeral would lex separately).
pub fn fresh_name(base: &str, avoid: &BTreeSet<Arc<str>>) -> Arc<str> {
    let is_ident = base.chars().next().is_some_and(|c| c.is_alphabetic());
    if is_ident {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { base } else { stem };
        (1..)
            .map(|n| format!("{stem}{n}"))
            .find(|c| !avoid.contains(c.as_str()))
            .map(|s| Arc::from(s.as_str()))
            .expect("unbounded")
    } else {
        let mut s = base.to_string();
        loop {
            s.push('#');
            if !avoid.contains(s.as_str()) {
                return Arc::from(s.as_str());
            }
        }
    }
}

/// Replaces every free occurrence of the variables in `sigma`.
pub fn substitute(c: &Construct, sigma: &Subst) -> Result<Construct, Error> {
    if sigma.is_empty() {
        return Ok(c.clone());
    }
    let mut used = BTreeSet::new();
    all_var_names(c, &mut used);
    for (k, v) in sigma {
        used.insert(k.clone());
        all_var_names(v, &mut used);
    }
    let mut s = Substituter { used };
    s.go(c, sigma)
}

/// Replaces a single variable.
pub fn substitute1(c: &Construct, name: &str, by: &Construct) -> Result<Construct, Error> {
    let mut s = Subst::new();
    s.insert(Arc::from(name), by.clone());
    substitute(c, &s)
}

struct Substituter {
    used: BTreeSet<Arc<str>>,
}

fn restrict(sigma: &Subst, remove: &[Arc<str>]) -> Subst {
    sigma
        .iter()
        .filter(|(k, _)| !remove.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Free variables of the images of those entries whose key is free in `scope`.
fn image_fvs(sigma: &Subst, scope_fv: &BTreeSet<Arc<str>>) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    for (k, v) in sigma {
        if scope_fv.contains(k) {
            out.extend(free_vars(v));
        }
    }
    out
}

impl Substituter {
    fn fresh(&mut self, base: &str) -> Arc<str> {
        let n = fresh_name(base, &self.used);
        self.used.insert(n.clone());
        n
    }

    fn go(&mut self, c: &Construct, sigma: &Subst) -> Result<Construct, Error> {
        if sigma.is_empty() {
            return Ok(c.clone());
        }
        match c.node() {
            Node::Ref(r) => {
                if r.kind == RefKind::Var {
                    if let Some(v) = sigma.get(&r.internal) {
                        return Ok(v.clone());
                    }
                }
                Ok(c.clone())
            }
            Node::App { head, args } => {
                let head = self.subst_head(head, sigma)?;
                match scope_rule(&head) {
                    None => {
                        let args = args
                            .iter()
                            .map(|a| self.go(a, sigma))
                            .collect::<Result<Vec<_>, _>>()?;
                        Construct::app(head, args)
                    }
                    Some(rule) => {
                        let scoped: Vec<Construct> =
                            rule.scoped.iter().map(|&i| args[i].clone()).collect();
                        let (owner, scoped) =
                            self.scoped_group(&args[rule.owner], &scoped, sigma)?;
                        let mut out = Vec::with_capacity(args.len());
                        let mut it = scoped.into_iter();
                        for (i, a) in args.iter().enumerate() {
                            if i == rule.owner {
                                out.push(owner.clone());
                            } else if rule.scoped.contains(&i) {
                                out.push(it.next().expect("scoped arg"));
                            } else {
                                out.push(self.go(a, sigma)?);
                            }
                        }
                        Construct::app(head, out)
                    }
                }
            }
            Node::Def(d) => {
                let d = self.subst_simple(d, sigma)?;
                Construct::simple_def(d)
            }
            Node::DefApply { def, model, target } => {
                let model = self.go(model, sigma)?;
                let (def, mut t) = self.scoped_group(def, std::slice::from_ref(target), sigma)?;
                Construct::def_apply(def, model, t.remove(0))
            }
            Node::ModelAssert { def, model } => {
                Construct::model_assert(self.go(def, sigma)?, self.go(model, sigma)?)
            }
            Node::Dot { model, field, mode } => {
                Construct::dot(self.go(model, sigma)?, field, *mode)
            }
            Node::SetTerm(e) => Construct::set_term(
                e.iter()
                    .map(|x| self.go(x, sigma))
                    .collect::<Result<_, _>>()?,
            ),
            Node::Tuple(e) => Construct::tuple(
                e.iter()
                    .map(|x| self.go(x, sigma))
                    .collect::<Result<_, _>>()?,
            ),
            Node::BracketDef(d) => {
                let names = d_names(d);
                if names.complete && names.known.iter().any(|n| sigma.contains_key(n)) {
                    let expanded = expand_bracket(d)?;
                    return self.go(&expanded, sigma);
                }
                Construct::bracket_def(self.go(d, sigma)?)
            }
        }
    }

    fn subst_head(&mut self, head: &Ref, sigma: &Subst) -> Result<Ref, Error> {
        if head.kind != RefKind::Var {
            return Ok(head.clone());
        }
        match sigma.get(&head.internal) {
            None => Ok(head.clone()),
            Some(v) => match v.as_ref() {
                Some(r) if r.arity == head.arity => Ok(r.clone()),
                _ => Err(Error::ModeMismatch {
                    expected: Mode::T,
                    found: v.mode(),
                    context: format!(
                        "replacement for operation {} must be a name of arity {}",
                        head.external, head.arity
                    ),
                }),
            },
        }
    }

    fn subst_simple(&mut self, d: &SimpleDef, sigma: &Subst) -> Result<SimpleDef, Error> {
        let mut sigma = sigma.clone();
        let mut binders = Vec::with_capacity(d.binders.len());
        for (i, b) in d.binders.iter().enumerate() {
            let ty = match &b.ty {
                Some(t) => Some(self.go(t, &sigma)?),
                None => None,
            };
            sigma.remove(&b.name);
            // free variables of everything this binder scopes over
            let mut rest_fv = free_vars(&d.body);
            for later in &d.binders[i + 1..] {
                if let Some(t) = &later.ty {
                    rest_fv.extend(free_vars(t));
                }
            }
            let danger = image_fvs(&sigma, &rest_fv);
            let name = if danger.contains(&b.name) {
                let n = self.fresh(&b.name);
                sigma.insert(
                    b.name.clone(),
                    Construct::reference(Ref::var(&n, b.arity.clone())),
                );
                n
            } else {
                b.name.clone()
            };
            binders.push(Binder {
                name,
                arity: b.arity.clone(),
                ty,
            });
        }
        let body = self.go(&d.body, &sigma)?;
        Ok(SimpleDef {
            kind: d.kind,
            binders,
            body,
        })
    }

    /// Substitutes into a definition together with the arguments that lie in
    /// the scope of its names.
    fn scoped_group(
        &mut self,
        owner: &Construct,
        scoped: &[Construct],
        sigma: &Subst,
    ) -> Result<(Construct, Vec<Construct>), Error> {
        let mut owner = owner.clone();
        let mut scoped: Vec<Construct> = scoped.to_vec();
        let old = d_names(&owner).known;
        let inner = restrict(sigma, &old);
        // rename d-names that would capture free variables of images
        let mut scoped_fv = BTreeSet::new();
        for s in &scoped {
            scoped_fv.extend(free_vars(s));
        }
        let danger = image_fvs(&inner, &scoped_fv);
        let clashes: Vec<Arc<str>> = old
            .iter()
            .filter(|n| danger.contains(*n))
            .cloned()
            .collect();
        if !clashes.is_empty() {
            let mut map = BTreeMap::new();
            for n in clashes {
                let f = self.fresh(&n);
                map.insert(n, f);
            }
            owner = rename_def_names(&owner, &map)?;
            scoped = scoped
                .iter()
                .map(|s| rename_free(s, &owner, &map))
                .collect::<Result<_, _>>()?;
        }
        let old = d_names(&owner).known;
        let inner = restrict(sigma, &old);
        let owner2 = self.go(&owner, sigma)?;
        let scoped2: Vec<Construct> = scoped
            .iter()
            .map(|s| self.go(s, &inner))
            .collect::<Result<_, _>>()?;
        // names revealed by instantiating a definitional variable must not
        // capture anything in the scoped arguments
        let new = d_names(&owner2).known;
        let mut fv2 = BTreeSet::new();
        for s in &scoped2 {
            fv2.extend(free_vars(s));
        }
        let revealed: Vec<Arc<str>> = new
            .iter()
            .filter(|n| !old.contains(n) && fv2.contains(*n))
            .cloned()
            .collect();
        if revealed.is_empty() {
            return Ok((owner2, scoped2));
        }
        let mut map = BTreeMap::new();
        for n in revealed {
            let f = self.fresh(&n);
            map.insert(n, f);
        }
        Ok((rename_def_names(&owner2, &map)?, scoped2))
    }
}

/// Renames free occurrences of variables in `map` inside `c`; the new names
/// are fresh, so no capture can occur. `owner` supplies binder arities.
fn rename_free(
    c: &Construct,
    owner: &Construct,
    map: &BTreeMap<Arc<str>, Arc<str>>,
) -> Result<Construct, Error> {
    let arities = all_binder_arities(owner);
    let mut sigma = Subst::new();
    for (from, to) in map {
        let ar = arities
            .iter()
            .find(|(n, _)| n == from)
            .map(|(_, a)| a.clone())
            .unwrap_or_else(super::garity::GArity::term);
        sigma.insert(from.clone(), Construct::reference(Ref::var(to, ar)));
    }
    substitute(c, &sigma)
}

/// Alpha-renames d-names of a definition (`map` targets must be fresh).
pub fn rename_def_names(
    d: &Construct,
    map: &BTreeMap<Arc<str>, Arc<str>>,
) -> Result<Construct, Error> {
    match d.node() {
        Node::Def(sd) => {
            let mut sigma = Subst::new();
            let mut binders = Vec::new();
            for b in &sd.binders {
                let ty = match &b.ty {
                    Some(t) => Some(substitute(t, &sigma)?),
                    None => None,
                };
                let name = match map.get(&b.name) {
                    Some(n) => {
                        sigma.insert(
                            b.name.clone(),
                            Construct::reference(Ref::var(n, b.arity.clone())),
                        );
                        n.clone()
                    }
                    None => b.name.clone(),
                };
                binders.push(Binder {
                    name,
                    arity: b.arity.clone(),
                    ty,
                });
            }
            let body = substitute(&sd.body, &sigma)?;
            Construct::simple_def(SimpleDef {
                kind: sd.kind,
                binders,
                body,
            })
        }
        Node::App { head, args } if d.mode() == Mode::D => {
            let rule = name_rule(head);
            let scope = scope_rule(head);
            let mut out: Vec<Construct> = args.to_vec();
            let owners: Vec<usize> = match rule {
                NameRule::Of(i) => vec![i],
                NameRule::Concat | NameRule::HConcat => vec![0, 1],
                NameRule::Opaque => vec![],
            };
            for &i in &owners {
                let mut sub = map.clone();
                if i == 1 && matches!(rule, NameRule::HConcat) {
                    // the first name of d2 is merged away; it is bound inside d2
                    if let Some(first) = d_names(&args[1]).known.first() {
                        sub.remove(first);
                    }
                }
                let mine: BTreeMap<_, _> = sub
                    .into_iter()
                    .filter(|(k, _)| d_names(&args[i]).contains(k))
                    .collect();
                if mine.is_empty() {
                    continue;
                }
                out[i] = rename_def_names(&args[i], &mine)?;
                if let Some(sr) = &scope {
                    if sr.owner == i {
                        for &j in &sr.scoped {
                            out[j] = rename_free(&args[j], &args[i], &mine)?;
                        }
                    }
                }
            }
            Construct::app(head.clone(), out)
        }
        _ => Ok(d.clone()),
    }
}

/// `[d]` for a definition with known names: the single name, or the tuple.
pub fn expand_bracket(d: &Construct) -> Result<Construct, Error> {
    let arities = all_binder_arities(d);
    let names = d_names(d).known;
    let refs: Vec<Construct> = names
        .iter()
        .map(|n| {
            let ar = arities
                .iter()
                .find(|(m, _)| m == n)
                .map(|(_, a)| a.clone())
                .unwrap_or_else(super::garity::GArity::term);
            Construct::reference(Ref::var(n, ar))
        })
        .collect();
    if refs.len() == 1 {
        Ok(refs.into_iter().next().expect("one"))
    } else {
        Construct::tuple(refs)
    }
}

/// Renames every binder, in traversal order, to names produced by `gen`.
/// Returns the construct and, for definitions, the renaming of its d-names.
pub fn rename_all_binders(
    c: &Construct,
    gen: &mut dyn FnMut(&str) -> Arc<str>,
) -> Result<Construct, Error> {
    Ok(RenameAll { gen }.go(c, &BTreeMap::new(), false)?.0)
}

type DMap = Vec<(Arc<str>, Arc<str>)>;

struct RenameAll<'a> {
    gen: &'a mut dyn FnMut(&str) -> Arc<str>,
}

impl RenameAll<'_> {
    fn go(
        &mut self,
        c: &Construct,
        env: &BTreeMap<Arc<str>, Arc<str>>,
        keep_binders: bool,
    ) -> Result<(Construct, DMap), Error> {
        let rn = |r: &Ref| -> Ref {
            if r.kind == RefKind::Var {
                if let Some(n) = env.get(&r.internal) {
                    return r.renamed(n);
                }
            }
            r.clone()
        };
        match c.node() {
            Node::Ref(r) => Ok((Construct::reference(rn(r)), vec![])),
            Node::Def(d) => {
                let mut env2 = env.clone();
                let mut binders = Vec::new();
                let mut map = Vec::new();
                for b in &d.binders {
                    let ty = match &b.ty {
                        Some(t) => Some(self.go(t, &env2, keep_binders)?.0),
                        None => None,
                    };
                    let nb = if keep_binders {
                        env.get(&b.name).cloned().unwrap_or_else(|| b.name.clone())
                    } else {
                        (self.gen)(&b.name)
                    };
                    env2.insert(b.name.clone(), nb.clone());
                    map.push((b.name.clone(), nb.clone()));
                    binders.push(Binder {
                        name: nb,
                        arity: b.arity.clone(),
                        ty,
                    });
                }
                let body = self.go(&d.body, &env2, keep_binders)?.0;
                Ok((
                    Construct::simple_def(SimpleDef {
                        kind: d.kind,
                        binders,
                        body,
                    })?,
                    map,
                ))
            }
            Node::App { head, args } => {
                let head2 = rn(head);
                let scope = scope_rule(head);
                let mut out = vec![None; args.len()];
                let mut maps: Vec<DMap> = vec![vec![]; args.len()];
                if let Some(sr) = &scope {
                    let (o, m) = self.go(&args[sr.owner], env, keep_binders)?;
                    out[sr.owner] = Some(o);
                    let mut env2 = env.clone();
                    for (a, b) in &m {
                        env2.insert(a.clone(), b.clone());
                    }
                    maps[sr.owner] = m;
                    for &j in &sr.scoped {
                        let (s, m2) = self.go(&args[j], &env2, keep_binders)?;
                        out[j] = Some(s);
                        maps[j] = m2;
                    }
                }
                for (i, a) in args.iter().enumerate() {
                    if out[i].is_none() {
                        let (s, m) = self.go(a, env, keep_binders)?;
                        out[i] = Some(s);
                        maps[i] = m;
                    }
                }
                let out: Vec<Construct> = out.into_iter().map(|o| o.expect("filled")).collect();
                let map = if c.mode() == Mode::D {
                    match name_rule(head) {
                        NameRule::Of(i) => maps[i].clone(),
                        NameRule::Concat => {
                            let mut m = maps[0].clone();
                            m.extend(maps[1].iter().cloned());
                            m
                        }
                        NameRule::HConcat => {
                            let mut m = maps[0].clone();
                            m.extend(maps[1].iter().skip(1).cloned());
                            m
                        }
                        NameRule::Opaque => vec![],
                    }
                } else {
                    vec![]
                };
                Ok((Construct::app(head2, out)?, map))
            }
            Node::DefApply { def, model, target } => {
                let (d, m) = self.go(def, env, keep_binders)?;
                let model = self.go(model, env, keep_binders)?.0;
                let mut env2 = env.clone();
                for (a, b) in &m {
                    env2.insert(a.clone(), b.clone());
                }
                let t = self.go(target, &env2, keep_binders)?.0;
                Ok((Construct::def_apply(d, model, t)?, vec![]))
            }
            Node::ModelAssert { def, model } => Ok((
                Construct::model_assert(
                    self.go(def, env, keep_binders)?.0,
                    self.go(model, env, keep_binders)?.0,
                )?,
                vec![],
            )),
            Node::Dot { model, field, mode } => Ok((
                Construct::dot(self.go(model, env, keep_binders)?.0, field, *mode)?,
                vec![],
            )),
            Node::SetTerm(e) => Ok((
                Construct::set_term(
                    e.iter()
                        .map(|x| Ok(self.go(x, env, keep_binders)?.0))
                        .collect::<Result<_, Error>>()?,
                )?,
                vec![],
            )),
            Node::Tuple(e) => Ok((
                Construct::tuple(
                    e.iter()
                        .map(|x| Ok(self.go(x, env, keep_binders)?.0))
                        .collect::<Result<_, Error>>()?,
                )?,
                vec![],
            )),
            // the names of [d] refer outward, so they follow the environment
            Node::BracketDef(d) => Ok((Construct::bracket_def(self.go(d, env, true)?.0)?, vec![])),
        }
    }
}

/// Canonical representative of the alpha-equivalence class.
pub fn canonical(c: &Construct) -> Construct {
    let mut n = 0usize;
    let mut gen = |_: &str| {
        let s: Arc<str> = Arc::from(format!("%{n}").as_str());
        n += 1;
        s
    };
    rename_all_binders(c, &mut gen).expect("renaming preserves well-formedness")
}

/// Structural equality up to consistent renaming of bound names.
pub fn alpha_eq(a: &Construct, b: &Construct) -> bool {
    a == b || canonical(a) == canonical(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::construct::DefKind;
    use crate::syntax::garity::GArity;

    fn v(n: &str) -> Construct {
        Construct::var(n, Mode::T)
    }
    fn eq(a: Construct, b: Construct) -> Construct {
        Construct::app(Ref::primary("=", "=", "TTF".parse().unwrap()), vec![a, b]).unwrap()
    }
    fn def1(x: &str, body: Construct) -> Construct {
        Construct::simple_def(SimpleDef {
            kind: DefKind::Variables,
            binders: vec![Binder::plain(x)],
            body,
        })
        .unwrap()
    }
    fn all(d: Construct) -> Construct {
        Construct::app(Ref::primary("A[", "A[", "DF".parse().unwrap()), vec![d]).unwrap()
    }

    #[test]
    fn substitution_avoids_capture() {
        // A[x | x = y] with y := x  must not become A[x | x = x]
        let f = all(def1("x", eq(v("x"), v("y"))));
        let g = substitute1(&f, "y", &v("x")).unwrap();
        let fv = free_vars(&g);
        assert!(fv.contains("x"));
        assert!(!alpha_eq(&g, &all(def1("x", eq(v("x"), v("x"))))));
        assert!(alpha_eq(&g, &all(def1("z", eq(v("z"), v("x"))))));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let f = all(def1("x", eq(v("x"), v("y"))));
        let g = substitute1(&f, "x", &v("t")).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn alpha_equivalence_of_binders() {
        let a = all(def1("x", eq(v("x"), v("b"))));
        let b = all(def1("y", eq(v("y"), v("b"))));
        let c = all(def1("y", eq(v("y"), v("c"))));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn bounded_quantifier_scopes_its_body() {
        let ab = Ref::primary("A[#2", "A[", "DFF".parse().unwrap());
        let d = def1("x", eq(v("x"), v("a")));
        let f = Construct::app(ab.clone(), vec![d.clone(), eq(v("x"), v("y"))]).unwrap();
        assert_eq!(
            free_vars(&f).into_iter().collect::<Vec<_>>(),
            vec![Arc::from("a"), Arc::from("y")]
        );
        // y := x must rename the bounded variable
        let g = substitute1(&f, "y", &v("x")).unwrap();
        assert!(free_vars(&g).contains("x"));
        let other = Construct::app(
            ab,
            vec![def1("x1", eq(v("x1"), v("a"))), eq(v("x1"), v("x"))],
        )
        .unwrap();
        assert!(alpha_eq(&g, &other));
    }

    #[test]
    fn fresh_names() {
        let avoid: BTreeSet<Arc<str>> = ["x1", "x2"].iter().map(|s| Arc::from(*s)).collect();
        assert_eq!(&*fresh_name("x", &avoid), "x3");
        assert_eq!(&*fresh_name("*", &avoid), "*#");
        let _ = GArity::term();
    }
}
