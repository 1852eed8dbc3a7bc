//! Generators for the logical axiom schemas, recognition of instances, and
//! instantiation of schemas containing syntactic variables.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::defops::{free_mode, iff, imp, logical_app, not};
use crate::error::Error;
use crate::parser::{AxiomKind, Bindings};
use crate::syntax::{
    alpha_eq, d_names, free_vars, logical, substitute, substitute1, Construct, Mode, Node, Subst,
    Vocabulary,
};

fn proof(msg: impl Into<String>) -> Error {
    Error::Proof(msg.into())
}

fn expect(c: &Construct, m: Mode, what: &str) -> Result<(), Error> {
    if c.mode() == m {
        Ok(())
    } else {
        Err(proof(format!("{what} must have mode {m}, found {c}")))
    }
}

fn eps_term(d: &Construct) -> Result<Construct, Error> {
    logical_app(logical::EPS, vec![d.clone()])
}

fn dnot(d: &Construct) -> Result<Construct, Error> {
    logical_app(logical::DNOT, vec![d.clone()])
}

/// `d(z) → d(H[d])`
pub fn axiom_epsilon(d: &Construct, z: &Construct) -> Result<Construct, Error> {
    expect(d, Mode::D, "the definition")?;
    expect(z, Mode::T, "the model")?;
    let left = Construct::model_assert(d.clone(), z.clone())?;
    let right = Construct::model_assert(d.clone(), eps_term(d)?)?;
    Ok(imp(left, right))
}

/// `E[d] ≡ d(H[d])`
pub fn axiom_e_def(d: &Construct) -> Result<Construct, Error> {
    expect(d, Mode::D, "the definition")?;
    let ex = logical_app(logical::EX, vec![d.clone()])?;
    Ok(iff(ex, Construct::model_assert(d.clone(), eps_term(d)?)?))
}

/// `A[d] ≡ d(H[~d])`
pub fn axiom_a_def(d: &Construct) -> Result<Construct, Error> {
    expect(d, Mode::D, "the definition")?;
    let all = logical_app(logical::ALL, vec![d.clone()])?;
    let witness = eps_term(&dnot(d)?)?;
    Ok(iff(all, Construct::model_assert(d.clone(), witness)?))
}

fn bounded(
    q: &str,
    qb: &str,
    lifted: &str,
    d: &Construct,
    p: &Construct,
) -> Result<Construct, Error> {
    expect(d, Mode::D, "the definition")?;
    expect(p, Mode::F, "the bound formula")?;
    let left = logical_app(qb, vec![d.clone(), p.clone()])?;
    let right = logical_app(q, vec![logical_app(lifted, vec![d.clone(), p.clone()])?])?;
    Ok(iff(left, right))
}

/// `E[d, p] ≡ E[d & p]`
pub fn axiom_bounded_e(d: &Construct, p: &Construct) -> Result<Construct, Error> {
    bounded(logical::EX, logical::EX_BOUNDED, logical::DAND, d, p)
}

/// `A[d, p] ≡ A[d → p]`
pub fn axiom_bounded_a(d: &Construct, p: &Construct) -> Result<Construct, Error> {
    bounded(logical::ALL, logical::ALL_BOUNDED, logical::DIMP, d, p)
}

/// `x = x`
pub fn axiom_eq_refl(x: &Construct) -> Result<Construct, Error> {
    expect(x, Mode::T, "the term")?;
    logical_app(logical::EQ, vec![x.clone(), x.clone()])
}

/// `s = t → (Q[v := s] ≡ Q[v := t])` for the context `(v | Q)`.
pub fn axiom_leibniz(s: &Construct, t: &Construct, ctx: &Construct) -> Result<Construct, Error> {
    expect(s, Mode::T, "the left term")?;
    expect(t, Mode::T, "the right term")?;
    let sd = ctx
        .as_def()
        .filter(|sd| sd.binders.len() == 1 && sd.binders[0].ty.is_none())
        .ok_or_else(|| {
            proof(format!(
                "the replacement context must be (v | Q), found {ctx}"
            ))
        })?;
    let v = &sd.binders[0].name;
    let eq = logical_app(logical::EQ, vec![s.clone(), t.clone()])?;
    Ok(imp(
        eq,
        iff(substitute1(&sd.body, v, s)?, substitute1(&sd.body, v, t)?),
    ))
}

/// `P → if(P, x, y) = x` when `positive`, else `~P → if(P, x, y) = y`.
pub fn axiom_if(
    p: &Construct,
    x: &Construct,
    y: &Construct,
    positive: bool,
) -> Result<Construct, Error> {
    expect(p, Mode::F, "the condition")?;
    let term = logical_app(logical::IF, vec![p.clone(), x.clone(), y.clone()])?;
    Ok(if positive {
        imp(p.clone(), logical_app(logical::EQ, vec![term, x.clone()])?)
    } else {
        imp(
            not(p.clone()),
            logical_app(logical::EQ, vec![term, y.clone()])?,
        )
    })
}

/// The instances of `kind` for explicit arguments (two for `ifax`).
pub fn generate(kind: AxiomKind, args: &[Construct]) -> Result<Vec<Construct>, Error> {
    let n = match kind {
        AxiomKind::EDef | AxiomKind::ADef | AxiomKind::EqRefl => 1,
        AxiomKind::Eps | AxiomKind::BEDef | AxiomKind::BADef => 2,
        AxiomKind::Leibniz | AxiomKind::IfAx => 3,
    };
    if args.len() != n {
        return Err(proof(format!(
            "{} takes {n} arguments, got {}",
            kind.keyword(),
            args.len()
        )));
    }
    let a = args;
    Ok(match kind {
        AxiomKind::Eps => vec![axiom_epsilon(&a[0], &a[1])?],
        AxiomKind::EDef => vec![axiom_e_def(&a[0])?],
        AxiomKind::ADef => vec![axiom_a_def(&a[0])?],
        AxiomKind::BEDef => vec![axiom_bounded_e(&a[0], &a[1])?],
        AxiomKind::BADef => vec![axiom_bounded_a(&a[0], &a[1])?],
        AxiomKind::EqRefl => vec![axiom_eq_refl(&a[0])?],
        AxiomKind::Leibniz => vec![axiom_leibniz(&a[0], &a[1], &a[2])?],
        AxiomKind::IfAx => vec![
            axiom_if(&a[0], &a[1], &a[2], true)?,
            axiom_if(&a[0], &a[1], &a[2], false)?,
        ],
    })
}

fn split<'a>(c: &'a Construct, internal: &str) -> Option<&'a [Construct]> {
    if c.is_app_of(internal) {
        c.as_app().map(|(_, a)| a)
    } else {
        None
    }
}

/// Reads the schema arguments off a formula of the shape of `kind`.
fn extract(kind: AxiomKind, f: &Construct) -> Option<Vec<Construct>> {
    let lhs = || {
        split(f, logical::IFF)
            .or_else(|| split(f, logical::IMP))
            .map(|a| &a[0])
    };
    match kind {
        AxiomKind::Eps => match lhs()?.node() {
            Node::ModelAssert { def, model } => Some(vec![def.clone(), model.clone()]),
            _ => None,
        },
        AxiomKind::EDef => Some(vec![split(lhs()?, logical::EX)?[0].clone()]),
        AxiomKind::ADef => Some(vec![split(lhs()?, logical::ALL)?[0].clone()]),
        AxiomKind::BEDef => Some(split(lhs()?, logical::EX_BOUNDED)?.to_vec()),
        AxiomKind::BADef => Some(split(lhs()?, logical::ALL_BOUNDED)?.to_vec()),
        AxiomKind::EqRefl => Some(vec![split(f, logical::EQ)?[0].clone()]),
        AxiomKind::IfAx => {
            let eq = &split(f, logical::IMP)?[1];
            Some(split(&split(eq, logical::EQ)?[0], logical::IF)?.to_vec())
        }
        AxiomKind::Leibniz => None,
    }
}

/// Checks that `f` is an instance of the axiom schema `kind`, with the given
/// arguments or with arguments read off `f`.
pub fn check_axiom(kind: AxiomKind, args: &[Construct], f: &Construct) -> Result<(), Error> {
    if args.is_empty() && kind == AxiomKind::Leibniz {
        return if leibniz_instance(f) {
            Ok(())
        } else {
            Err(proof(format!(
                "{f} is not an instance of the replacement axiom"
            )))
        };
    }
    let args = if args.is_empty() {
        extract(kind, f)
            .ok_or_else(|| proof(format!("{f} does not have the shape of {}", kind.keyword())))?
    } else {
        args.to_vec()
    };
    let instances = generate(kind, &args)?;
    if instances.iter().any(|i| alpha_eq(i, f)) {
        Ok(())
    } else {
        Err(proof(format!("expected {}, found {f}", instances[0])))
    }
}

/// `s = t → (A ≡ B)` where B is A with some occurrences of s replaced by t,
/// none of them under a binder for a free variable of s or t.
fn leibniz_instance(f: &Construct) -> bool {
    let Some([eq, body]) = split(f, logical::IMP).map(|a| [&a[0], &a[1]]) else {
        return false;
    };
    let (Some(st), Some(ab)) = (split(eq, logical::EQ), split(body, logical::IFF)) else {
        return false;
    };
    let mut fv = free_vars(&st[0]);
    fv.extend(free_vars(&st[1]));
    let m = Replaced {
        s: &st[0],
        t: &st[1],
        fv,
    };
    m.check(&ab[0], &ab[1], &mut Vec::new())
}

struct Replaced<'a> {
    s: &'a Construct,
    t: &'a Construct,
    fv: BTreeSet<Arc<str>>,
}

impl Replaced<'_> {
    fn free(&self, bound: &[Arc<str>]) -> bool {
        bound.iter().all(|b| !self.fv.contains(b))
    }

    fn check(&self, a: &Construct, b: &Construct, bound: &mut Vec<Arc<str>>) -> bool {
        if a == b {
            return true;
        }
        if alpha_eq(a, self.s) && alpha_eq(b, self.t) && self.free(bound) {
            return true;
        }
        let n = bound.len();
        let ok = match (a.node(), b.node()) {
            (Node::App { head: h1, args: a1 }, Node::App { head: h2, args: a2 }) => {
                h1 == h2 && a1.len() == a2.len() && {
                    let rule = crate::syntax::scope::scope_rule(h1);
                    let names = rule
                        .as_ref()
                        .map(|r| (d_names(&a1[r.owner]), d_names(&a2[r.owner])));
                    if names.as_ref().is_some_and(|(x, y)| x.known != y.known) {
                        return false;
                    }
                    a1.iter().zip(a2).enumerate().all(|(i, (x, y))| {
                        let k = bound.len();
                        if let (Some(r), Some((nx, _))) = (&rule, &names) {
                            if r.scoped.contains(&i) {
                                bound.extend(nx.known.iter().cloned());
                            }
                        }
                        let ok = self.check(x, y, bound);
                        bound.truncate(k);
                        ok
                    })
                }
            }
            (Node::Def(d1), Node::Def(d2)) => {
                d1.kind == d2.kind
                    && d1.binders.len() == d2.binders.len()
                    && d1.binders.iter().zip(&d2.binders).all(|(x, y)| {
                        let ok = x.name == y.name
                            && x.arity == y.arity
                            && match (&x.ty, &y.ty) {
                                (None, None) => true,
                                (Some(s), Some(t)) => self.check(s, t, bound),
                                _ => false,
                            };
                        bound.push(x.name.clone());
                        ok
                    })
                    && self.check(&d1.body, &d2.body, bound)
            }
            (
                Node::DefApply {
                    def: d1,
                    model: m1,
                    target: t1,
                },
                Node::DefApply {
                    def: d2,
                    model: m2,
                    target: t2,
                },
            ) => {
                let names = d_names(d1).known;
                self.check(d1, d2, bound)
                    && self.check(m1, m2, bound)
                    && names == d_names(d2).known
                    && {
                        bound.extend(names);
                        self.check(t1, t2, bound)
                    }
            }
            (
                Node::ModelAssert { def: d1, model: m1 },
                Node::ModelAssert { def: d2, model: m2 },
            ) => self.check(d1, d2, bound) && self.check(m1, m2, bound),
            (
                Node::Dot {
                    model: m1,
                    field: f1,
                    mode: o1,
                },
                Node::Dot {
                    model: m2,
                    field: f2,
                    mode: o2,
                },
            ) => f1 == f2 && o1 == o2 && self.check(m1, m2, bound),
            (Node::SetTerm(e1), Node::SetTerm(e2)) | (Node::Tuple(e1), Node::Tuple(e2)) => {
                e1.len() == e2.len() && e1.iter().zip(e2).all(|(x, y)| self.check(x, y, bound))
            }
            (Node::BracketDef(d1), Node::BracketDef(d2)) => self.check(d1, d2, bound),
            _ => false,
        };
        bound.truncate(n);
        ok
    }
}

/// Substitutes for free variables of `f`, checking that each binding has
/// the mode of the variable.
pub fn instantiate(
    f: &Construct,
    bindings: &Bindings,
    vocab: &Vocabulary,
) -> Result<Construct, Error> {
    let mut sigma = Subst::new();
    for (k, v) in bindings {
        let mode = free_mode(f, k).or_else(|| vocab.synvar(k));
        match mode {
            Some(m) if m != v.mode() => {
                return Err(proof(format!(
                    "{k} has mode {m}, cannot be bound to {v} of mode {}",
                    v.mode()
                )))
            }
            None => return Err(proof(format!("{k} is not a variable of {f}"))),
            _ => {}
        }
        if sigma.insert(k.clone(), v.clone()).is_some() {
            return Err(proof(format!("{k} is bound twice")));
        }
    }
    substitute(f, &sigma).map_err(|e| proof(e.to_string()))
}

/// Instantiates a schema: every syntactic variable of `schema` must be bound,
/// each to a construct of its declared mode, and the result may mention no
/// free variable other than syntactic variables.
pub fn instantiate_schema(
    schema: &Construct,
    bindings: &Bindings,
    vocab: &Vocabulary,
) -> Result<Construct, Error> {
    for (k, v) in bindings {
        match vocab.synvar(k) {
            None => return Err(proof(format!("{k} is not a syntactic variable"))),
            Some(m) if m != v.mode() => {
                return Err(proof(format!(
                    "{k} has mode {m}, cannot be bound to {v} of mode {}",
                    v.mode()
                )))
            }
            _ => {}
        }
    }
    for x in free_vars(schema) {
        if vocab.synvar(&x).is_some() && !bindings.iter().any(|(k, _)| *k == x) {
            return Err(proof(format!("syntactic variable {x} is unbound")));
        }
    }
    let out = instantiate(schema, bindings, vocab)?;
    if let Some(x) = free_vars(&out)
        .into_iter()
        .find(|x| vocab.synvar(x).is_none())
    {
        return Err(proof(format!("the instance has the free variable {x}")));
    }
    Ok(out)
}
