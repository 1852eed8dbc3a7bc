//! Inference rules: modus ponens, evaluation in a model, and the four
//! derived quantifier rules. Each function checks the shape of its premises
//! and returns the conclusion.

use std::sync::Arc;

use crate::defops::{imp, logical_app, model_components};
use crate::error::Error;
use crate::syntax::{alpha_eq, d_names, free_vars, logical, Construct, Mode, Node};

fn proof(msg: impl Into<String>) -> Error {
    Error::Proof(msg.into())
}

fn args_of<'a>(c: &'a Construct, internal: &str) -> Option<&'a [Construct]> {
    if c.is_app_of(internal) {
        c.as_app().map(|(_, a)| a)
    } else {
        None
    }
}

/// `d` and `z` of a model assertion `d(z)`.
pub fn model_assertion(c: &Construct) -> Option<(&Construct, &Construct)> {
    match c.node() {
        Node::ModelAssert { def, model } => Some((def, model)),
        _ => None,
    }
}

/// From `p` and `p → q` infer `q`.
pub fn rule_mp(p: &Construct, pq: &Construct) -> Result<Construct, Error> {
    match args_of(pq, logical::IMP) {
        Some([a, q]) if alpha_eq(a, p) => Ok(q.clone()),
        Some(_) => Err(proof(format!("the antecedent of {pq} is not {p}"))),
        None => Err(proof(format!("{pq} is not an implication"))),
    }
}

/// From `p` and `d(z)` infer `d(p, z)`.
pub fn rule_subst(p: &Construct, dz: &Construct) -> Result<Construct, Error> {
    let (d, z) =
        model_assertion(dz).ok_or_else(|| proof(format!("{dz} is not a model assertion d(z)")))?;
    let names = d_names(d);
    let fv = free_vars(p);
    if names.known.iter().any(|n| fv.contains(n))
        && model_components(z, names.known.len()).is_none()
    {
        return Err(proof(format!(
            "{z} is not a model with {} components",
            names.known.len()
        )));
    }
    Construct::def_apply(d.clone(), z.clone(), p.clone()).map_err(|e| proof(e.to_string()))
}

/// Checks that `z` is a variable of mode T not free in any of `others`.
fn eigenvariable(z: &Construct, others: &[&Construct]) -> Result<Arc<str>, Error> {
    let name = match z.as_ref() {
        Some(r) if r.is_var() && z.mode() == Mode::T => r.internal.clone(),
        _ => return Err(proof(format!("{z} is not a variable"))),
    };
    for o in others {
        if free_vars(o).contains(&name) {
            return Err(proof(format!("{name} occurs free in {o}")));
        }
    }
    Ok(name)
}

fn all(d: &Construct) -> Construct {
    logical_app(logical::ALL, vec![d.clone()]).expect("definition")
}

fn ex(d: &Construct) -> Construct {
    logical_app(logical::EX, vec![d.clone()]).expect("definition")
}

/// The parts `(p, d, z)` of a premise `p → d(z)`.
pub fn alpha_parts(premise: &Construct) -> Result<(Construct, Construct, Construct), Error> {
    let shape = || proof(format!("{premise} does not have the shape P → d(z)"));
    let [p, dz] = args_of(premise, logical::IMP).ok_or_else(shape)? else {
        return Err(shape());
    };
    let (d, z) = model_assertion(dz).ok_or_else(shape)?;
    eigenvariable(z, &[p, d])?;
    Ok((p.clone(), d.clone(), z.clone()))
}

/// From `p → d(z)` infer `p → A[d]`, z not free in p or d.
pub fn rule_alpha(premise: &Construct) -> Result<Construct, Error> {
    let (p, d, _) = alpha_parts(premise)?;
    Ok(imp(p, all(&d)))
}

/// The parts `(d, z, p)` of a premise `d(z) → p`.
pub fn beta_parts(premise: &Construct) -> Result<(Construct, Construct, Construct), Error> {
    let shape = || proof(format!("{premise} does not have the shape d(z) → P"));
    let [dz, p] = args_of(premise, logical::IMP).ok_or_else(shape)? else {
        return Err(shape());
    };
    let (d, z) = model_assertion(dz).ok_or_else(shape)?;
    eigenvariable(z, &[p, d])?;
    Ok((d.clone(), z.clone(), p.clone()))
}

/// From `d(z) → p` infer `E[d] → p`, z not free in p or d.
pub fn rule_beta(premise: &Construct) -> Result<Construct, Error> {
    let (d, _, p) = beta_parts(premise)?;
    Ok(imp(ex(&d), p))
}

/// The parts `(d, z)` of a premise `d(z)`.
pub fn gamma_prime_parts(premise: &Construct) -> Result<(Construct, Construct), Error> {
    let (d, z) = model_assertion(premise)
        .ok_or_else(|| proof(format!("{premise} is not a model assertion d(z)")))?;
    eigenvariable(z, &[d])?;
    Ok((d.clone(), z.clone()))
}

/// From `d(z)` infer `A[d]`, z not free in d.
pub fn rule_gamma_prime(premise: &Construct) -> Result<Construct, Error> {
    let (d, _) = gamma_prime_parts(premise)?;
    Ok(all(&d))
}

/// From `p` infer `A[d, p]`. When p mentions names of d, d must have exactly
/// one name.
pub fn rule_gamma(premise: &Construct, d: &Construct) -> Result<Construct, Error> {
    if d.mode() != Mode::D {
        return Err(proof(format!("{d} is not a definition")));
    }
    let names = d_names(d);
    let fv = free_vars(premise);
    if names.known.iter().any(|n| fv.contains(n)) && names.known.len() != 1 {
        return Err(proof(format!(
            "{premise} mentions names of {d}, which has {} names",
            names.known.len()
        )));
    }
    logical_app(logical::ALL_BOUNDED, vec![d.clone(), premise.clone()])
        .map_err(|e| proof(e.to_string()))
}
