//! Proof-script replay, traces, and expansion of scripts into primitive
//! steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::axioms::{
    axiom_a_def, axiom_bounded_a, axiom_e_def, check_axiom, generate, instantiate,
};
use super::rules::{
    alpha_parts, beta_parts, gamma_prime_parts, model_assertion, rule_gamma, rule_gamma_prime,
    rule_mp, rule_subst,
};
use super::taut::{is_tautology, valid, Skeleton};
use super::theory::Theory;
use crate::defops::{imp, logical_app, model_components, normal_form, structural_normal_form};
use crate::error::Error;
use crate::parser::{render_ascii, Alphabet, Just, ProofScript, Step};
use crate::syntax::scope::all_var_names;
use crate::syntax::subst::fresh_name;
use crate::syntax::{alpha_eq, d_names, free_vars, logical, Construct, Mode};

#[derive(Clone, Debug)]
pub struct TraceLine {
    pub index: usize,
    pub ok: bool,
    pub just: String,
    pub flags: Vec<&'static str>,
    pub formula: Construct,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.index,
            if self.ok { "ok" } else { "FAIL" },
            self.just
        )?;
        for fl in &self.flags {
            write!(f, " [{fl}]")?;
        }
        write!(f, " {}", render_ascii(&self.formula))
    }
}

/// The result of replaying a script: one trace line per checked step, and
/// the first failure, if any.
#[derive(Debug)]
pub struct Replay {
    pub trace: Vec<TraceLine>,
    pub outcome: Result<(), Error>,
}

fn proof(msg: impl Into<String>) -> Error {
    Error::Proof(msg.into())
}

fn flags(j: &Just) -> Vec<&'static str> {
    match j {
        Just::Axiom(k, _) => k.flag().into_iter().collect(),
        Just::Taut(_, extra) => {
            let mut v: Vec<_> = extra.iter().flat_map(flags).collect();
            v.dedup();
            v
        }
        _ => vec![],
    }
}

/// Replays `script` against `th`; the last step must be `statement`.
pub fn replay(th: &Theory, statement: &Construct, script: &ProofScript) -> Replay {
    replay_rule(th, &[], statement, script)
}

/// Replays the proof of a derived rule: `given` steps must be among
/// `premises`.
pub fn replay_rule(
    th: &Theory,
    premises: &[Construct],
    statement: &Construct,
    script: &ProofScript,
) -> Replay {
    let mut trace = Vec::new();
    let outcome = replay_into(th, premises, statement, script, &mut trace);
    Replay { trace, outcome }
}

/// Replays `script` as a proof of `statement`.
pub fn check_proof(th: &Theory, statement: &Construct, script: &ProofScript) -> Result<(), Error> {
    replay(th, statement, script).outcome
}

fn replay_into(
    th: &Theory,
    premises: &[Construct],
    statement: &Construct,
    script: &ProofScript,
    trace: &mut Vec<TraceLine>,
) -> Result<(), Error> {
    let mut known: BTreeMap<usize, Construct> = BTreeMap::new();
    for (pos, step) in script.steps.iter().enumerate() {
        let r = if step.index != pos + 1 {
            Err(proof(format!("expected step number {}", pos + 1)))
        } else if matches!(step.just, Just::Given)
            && !premises.iter().any(|p| alpha_eq(p, &step.formula))
        {
            Err(proof(format!("{} is not a premise", step.formula)))
        } else {
            check_step(th, &known, step)
        };
        trace.push(TraceLine {
            index: step.index,
            ok: r.is_ok(),
            just: step.just.render(Alphabet::Ascii),
            flags: flags(&step.just),
            formula: step.formula.clone(),
        });
        if let Err(e) = r {
            let msg = match e {
                Error::Proof(m) => m,
                e => e.to_string(),
            };
            return Err(proof(format!("step {}: {msg}", step.index)));
        }
        known.insert(step.index, step.formula.clone());
    }
    match script.steps.last() {
        None => Err(proof("empty proof")),
        Some(s) if !alpha_eq(&s.formula, statement) => Err(proof(format!(
            "step {}: the proof ends with {}, not with the statement {}",
            s.index, s.formula, statement
        ))),
        Some(_) => Ok(()),
    }
}

/// The formulas contributed by an axiom, theorem or schema citation.
pub fn cited(th: &Theory, j: &Just) -> Result<Vec<Construct>, Error> {
    match j {
        Just::Axiom(k, args) if args.is_empty() => Err(proof(format!(
            "{} needs explicit arguments when cited",
            k.keyword()
        ))),
        Just::Axiom(k, args) => generate(*k, args),
        Just::Thm(n) => Ok(vec![th.citable(n)?.clone()]),
        Just::Defax(n, ar, b) => Ok(vec![instantiate(
            th.defining_axiom(n, ar.as_ref())?,
            b,
            th.vocabulary(),
        )?]),
        Just::Schema(n, b) => {
            let src = match th.citable(n) {
                Ok(s) => s,
                Err(e) => th.defining_axiom(n, None).map_err(|_| e)?,
            };
            Ok(vec![instantiate(src, b, th.vocabulary())?])
        }
        other => Err(proof(format!(
            "{} is not a citation",
            other.render(Alphabet::Ascii)
        ))),
    }
}

/// Whether `q` follows tautologically from `premises`.
fn follows(premises: &[Construct], q: &Construct, max_atoms: usize) -> Result<bool, Error> {
    let mut all = premises.to_vec();
    all.push(q.clone());
    let (props, atoms) = Skeleton::of_all(&all);
    if atoms.len() > max_atoms || atoms.len() > 63 {
        return Err(Error::TooManyAtoms {
            found: atoms.len(),
            limit: max_atoms,
        });
    }
    let (goal, hyps) = props.split_last().expect("nonempty");
    Ok((0u64..1 << atoms.len()).all(|bits| {
        let v = |i: usize| bits >> i & 1 == 1;
        !hyps.iter().all(|h| h.eval(&v)) || goal.eval(&v)
    }))
}

fn taut_check(premises: &[Construct], q: &Construct, max_atoms: usize) -> Result<(), Error> {
    let raw = follows(premises, q, max_atoms);
    if matches!(raw, Ok(true)) {
        return Ok(());
    }
    let nps: Vec<_> = premises.iter().map(structural_normal_form).collect();
    match follows(&nps, &structural_normal_form(q), max_atoms) {
        Ok(true) => Ok(()),
        Ok(false) => match raw {
            Err(e) => Err(e),
            _ if premises.is_empty() => Err(proof(format!("{q} is not a tautology"))),
            _ => Err(proof(format!(
                "{q} is not a tautological consequence of the cited steps"
            ))),
        },
        Err(e) => Err(e),
    }
}

fn same(found: &Construct, expected: &Construct) -> Result<(), Error> {
    if alpha_eq(found, expected) {
        Ok(())
    } else {
        Err(proof(format!("expected {expected}, found {found}")))
    }
}

/// Checks one step against the formulas of the earlier steps.
pub fn check_step(
    th: &Theory,
    known: &BTreeMap<usize, Construct>,
    step: &Step,
) -> Result<(), Error> {
    let f = &step.formula;
    if f.mode() != Mode::F {
        return Err(proof(format!("{f} is not a formula")));
    }
    let get = |i: &usize| {
        known
            .get(i)
            .ok_or_else(|| proof(format!("step {i} is not an earlier step")))
    };
    let max = th.options().max_atoms;
    match &step.just {
        Just::Given => Ok(()),
        Just::Taut(refs, extra) => {
            let mut ps = Vec::new();
            for i in refs {
                ps.push(get(i)?.clone());
            }
            for j in extra {
                ps.extend(cited(th, j)?);
            }
            taut_check(&ps, f, max)
        }
        Just::Axiom(k, args) => check_axiom(*k, args, f),
        Just::Mp(i, j) => same(f, &rule_mp(get(i)?, get(j)?)?),
        Just::Subst(i, j) => {
            let expected = rule_subst(get(i)?, get(j)?)?;
            if alpha_eq(f, &expected) || alpha_eq(&normal_form(f), &normal_form(&expected)) {
                Ok(())
            } else {
                Err(proof(format!(
                    "expected {expected} or its unfolding, found {f}"
                )))
            }
        }
        Just::Alpha(i) => same(f, &super::rules::rule_alpha(get(i)?)?),
        Just::Beta(i) => same(f, &super::rules::rule_beta(get(i)?)?),
        Just::GammaP(i) => same(f, &rule_gamma_prime(get(i)?)?),
        Just::Gamma(i, d) => {
            let d = match d {
                Some(d) => d.clone(),
                None => gamma_def(f)?,
            };
            same(f, &rule_gamma(get(i)?, &d)?)
        }
        Just::Thm(_) | Just::Defax(..) | Just::Schema(..) => same(f, &cited(th, &step.just)?[0]),
        Just::Inst(i, b) => same(f, &instantiate(get(i)?, b, th.vocabulary())?),
        Just::Unfold(i) => {
            let (a, b) = (normal_form(get(i)?), normal_form(f));
            if alpha_eq(&a, &b) {
                Ok(())
            } else {
                Err(proof(format!(
                    "{f} unfolds to {b}, step {i} unfolds to {a}"
                )))
            }
        }
    }
}

fn gamma_def(f: &Construct) -> Result<Construct, Error> {
    if f.is_app_of(logical::ALL_BOUNDED) {
        Ok(f.as_app().expect("application").1[0].clone())
    } else {
        Err(proof(format!("{f} does not have the shape A[d, P]")))
    }
}

/// Rewrites a script so that it uses only axioms, citations, instances,
/// `unfold`, argument-free `taut` and modus ponens. The result proves the
/// same statement; rule applications are replaced by their derivations.
pub fn expand_script(th: &Theory, script: &ProofScript) -> Result<ProofScript, Error> {
    let mut avoid = BTreeSet::new();
    for s in &script.steps {
        all_var_names(&s.formula, &mut avoid);
    }
    avoid.extend(th.vocabulary().synvars().map(|(n, _)| n.clone()));
    let mut e = Emitter {
        steps: Vec::new(),
        avoid,
        pos: Default::default(),
        max_atoms: th.options().max_atoms,
    };
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for step in &script.steps {
        e.pos = step.pos;
        let m = |i: &usize| {
            map.get(i).copied().ok_or_else(|| {
                proof(format!(
                    "step {}: step {i} is not an earlier step",
                    step.index
                ))
            })
        };
        let f = step.formula.clone();
        let at = |r: Result<usize, Error>| {
            r.map_err(|e| match e {
                Error::Proof(msg) => proof(format!("step {}: {msg}", step.index)),
                e => e,
            })
        };
        let n = match &step.just {
            Just::Given | Just::Axiom(..) | Just::Thm(_) | Just::Defax(..) | Just::Schema(..) => {
                e.push(f, step.just.clone())
            }
            Just::Inst(i, b) => e.push(f, Just::Inst(m(i)?, b.clone())),
            Just::Unfold(i) => e.push(f, Just::Unfold(m(i)?)),
            Just::Mp(i, j) => e.push(f, Just::Mp(m(i)?, m(j)?)),
            Just::Taut(refs, extra) => {
                let mut prem = refs.iter().map(&m).collect::<Result<Vec<_>, _>>()?;
                for j in extra {
                    for c in cited(th, j)? {
                        prem.push(e.push(c, j.clone()));
                    }
                }
                at(e.taut_from(&prem, f))?
            }
            Just::Subst(i, j) => at(e.subst(m(i)?, m(j)?, f))?,
            Just::Alpha(i) => at(e.alpha(m(i)?, f))?,
            Just::Beta(i) => at(e.beta(m(i)?, f))?,
            Just::GammaP(i) => at(e.gamma_prime(m(i)?, f))?,
            Just::Gamma(i, d) => {
                let d = match d {
                    Some(d) => d.clone(),
                    None => gamma_def(&f)?,
                };
                at(e.gamma(m(i)?, &d, f))?
            }
        };
        map.insert(step.index, n);
    }
    Ok(ProofScript { steps: e.steps })
}

struct Emitter {
    steps: Vec<Step>,
    avoid: BTreeSet<Arc<str>>,
    pos: crate::error::Pos,
    max_atoms: usize,
}

fn model(d: &Construct, z: &Construct) -> Result<Construct, Error> {
    Construct::model_assert(d.clone(), z.clone())
}

fn eps(d: &Construct) -> Result<Construct, Error> {
    logical_app(logical::EPS, vec![d.clone()])
}

fn dnot(d: &Construct) -> Result<Construct, Error> {
    logical_app(logical::DNOT, vec![d.clone()])
}

impl Emitter {
    fn push(&mut self, formula: Construct, just: Just) -> usize {
        let index = self.steps.len() + 1;
        self.steps.push(Step {
            index,
            formula,
            just,
            pos: self.pos,
        });
        index
    }

    fn formula(&self, i: usize) -> Construct {
        self.steps[i - 1].formula.clone()
    }

    /// A tautology as an axiom, going through its normal form if needed.
    fn tautology(&mut self, f: Construct) -> Result<usize, Error> {
        if matches!(is_tautology(&f, self.max_atoms), Ok(true)) {
            return Ok(self.push(f, Just::Taut(vec![], vec![])));
        }
        let n = normal_form(&f);
        let s = Skeleton::of(&n);
        if s.atoms.len() > self.max_atoms || !valid(&s.prop, s.atoms.len()) {
            return Err(proof(format!("{f} is not a tautology")));
        }
        let i = self.push(n, Just::Taut(vec![], vec![]));
        Ok(self.push(f, Just::Unfold(i)))
    }

    /// `q` from the premise steps by one tautology and modus ponens.
    fn taut_from(&mut self, prem: &[usize], q: Construct) -> Result<usize, Error> {
        let chain = prem
            .iter()
            .rev()
            .fold(q.clone(), |acc, i| imp(self.formula(*i), acc));
        let mut cur = self.tautology(chain)?;
        for i in prem {
            let next = super::rules::rule_mp(&self.formula(*i), &self.formula(cur))?;
            cur = self.push(next, Just::Mp(*i, cur));
        }
        Ok(cur)
    }

    fn fresh(&mut self) -> Construct {
        let n = fresh_name("z", &self.avoid);
        self.avoid.insert(n.clone());
        Construct::var(&n, Mode::T)
    }

    fn subst(&mut self, i: usize, j: usize, f: Construct) -> Result<usize, Error> {
        let p = self.formula(i);
        let dz = self.formula(j);
        let (d, z) =
            model_assertion(&dz).ok_or_else(|| proof(format!("{dz} is not a model assertion")))?;
        let names = d_names(d).known;
        let fv = free_vars(&p);
        if names.iter().all(|n| !fv.contains(n)) {
            return Ok(self.push(f, Just::Unfold(i)));
        }
        let comps = model_components(z, names.len()).ok_or_else(|| {
            proof(format!(
                "{z} is not a model with {} components",
                names.len()
            ))
        })?;
        let b: Vec<_> = names
            .iter()
            .zip(comps)
            .filter(|(n, _)| fv.contains(*n))
            .map(|(n, c)| (n.clone(), c))
            .collect();
        let inst = instantiate(&p, &b, &Default::default())?;
        let a = self.push(inst, Just::Inst(i, b));
        Ok(self.push(f, Just::Unfold(a)))
    }

    fn alpha(&mut self, i: usize, f: Construct) -> Result<usize, Error> {
        let (p, d, z) = alpha_parts(&self.formula(i))?;
        let w = eps(&dnot(&d)?)?;
        let a = self.push(
            imp(p, model(&d, &w)?),
            Just::Inst(i, vec![(var_name(&z), w)]),
        );
        let b = self.push(
            axiom_a_def(&d)?,
            Just::Axiom(crate::parser::AxiomKind::ADef, vec![d]),
        );
        self.taut_from(&[a, b], f)
    }

    fn beta(&mut self, i: usize, f: Construct) -> Result<usize, Error> {
        let (d, z, p) = beta_parts(&self.formula(i))?;
        let w = eps(&d)?;
        let a = self.push(
            imp(model(&d, &w)?, p),
            Just::Inst(i, vec![(var_name(&z), w)]),
        );
        let b = self.push(
            axiom_e_def(&d)?,
            Just::Axiom(crate::parser::AxiomKind::EDef, vec![d]),
        );
        self.taut_from(&[a, b], f)
    }

    fn gamma_prime(&mut self, i: usize, f: Construct) -> Result<usize, Error> {
        let (d, z) = gamma_prime_parts(&self.formula(i))?;
        let w = eps(&dnot(&d)?)?;
        let a = self.push(model(&d, &w)?, Just::Inst(i, vec![(var_name(&z), w)]));
        let b = self.push(
            axiom_a_def(&d)?,
            Just::Axiom(crate::parser::AxiomKind::ADef, vec![d]),
        );
        self.taut_from(&[a, b], f)
    }

    fn gamma(&mut self, i: usize, d: &Construct, f: Construct) -> Result<usize, Error> {
        use crate::parser::AxiomKind;
        let p = self.formula(i);
        rule_gamma(&p, d)?;
        let z = self.fresh();
        let names = d_names(d).known;
        let fv = free_vars(&p);
        let (a, q) = match names.iter().find(|n| fv.contains(*n)) {
            Some(x) => {
                let b = vec![(x.clone(), z.clone())];
                let q = instantiate(&p, &b, &Default::default())?;
                (self.push(q.clone(), Just::Inst(i, b)), q)
            }
            None => (i, p.clone()),
        };
        let dz = model(d, &z)?;
        let b = self.taut_from(&[a], imp(dz.clone(), q))?;
        let applied = Construct::def_apply(d.clone(), z.clone(), p.clone())?;
        let c = self.push(imp(dz, applied), Just::Unfold(b));
        let dp = logical_app(logical::DIMP, vec![d.clone(), p.clone()])?;
        let e = self.push(model(&dp, &z)?, Just::Unfold(c));
        let w = eps(&dnot(&dp)?)?;
        let g = self.push(model(&dp, &w)?, Just::Inst(e, vec![(var_name(&z), w)]));
        let h = self.push(
            axiom_a_def(&dp)?,
            Just::Axiom(AxiomKind::ADef, vec![dp.clone()]),
        );
        let all = logical_app(logical::ALL, vec![dp])?;
        let k = self.taut_from(&[g, h], all)?;
        let l = self.push(
            axiom_bounded_a(d, &p)?,
            Just::Axiom(AxiomKind::BADef, vec![d.clone(), p.clone()]),
        );
        self.taut_from(&[k, l], f)
    }
}

fn var_name(z: &Construct) -> Arc<str> {
    z.as_ref().expect("variable").internal.clone()
}

/// Whether a script uses only primitive justifications.
pub fn is_primitive(script: &ProofScript) -> bool {
    script.steps.iter().all(|s| match &s.just {
        Just::Taut(refs, extra) => refs.is_empty() && extra.is_empty(),
        Just::Subst(..) | Just::Alpha(_) | Just::Beta(_) | Just::GammaP(_) | Just::Gamma(..) => {
            false
        }
        _ => true,
    })
}
